//! `subst-sfc`: command-line front end.
//!
//! Exit codes: 0 success, 1 other errors, 2 invalid rule file or failed check,
//! 3 unmet dense-set conditions, 64 usage errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use subst_sfc::cantor::{cantor_level, format_rational, level_json, parse_rational};
use subst_sfc::curve::{
    approximant, closed_region, continuity_check, cover_check, eval, CurveSpec, Seed,
};
use subst_sfc::fractal::{
    build_dense_set, check_conditions, check_interior, find_fixed_placements, DenseSetOptions,
};
use subst_sfc::io::{builtin_rule, builtin_seed, emit_svg, load_substitution, parse_seed, LoadedRule, RenderOptions, SvgObject};
use subst_sfc::ordering::{ordered_supertile, power};
use subst_sfc::substitution::{diameter_decay, diameter_decay_from, is_non_increasing, validate_substitution, DEFAULT_TILE_CAP};
use subst_sfc::{Error, TileId, Tolerance};

const EXIT_CHECK: u8 = 2;
const EXIT_CONDITIONS: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "subst-sfc", version, about = "Space-filling curves from planar substitutions")]
struct Cli {
    /// Refuse to build more than this many tiles.
    #[arg(long, global = true, default_value_t = DEFAULT_TILE_CAP)]
    cap: u128,
    /// Named order variant of the rule (e.g. `tm` for thue_morse_2d).
    #[arg(long, global = true)]
    order: Option<String>,
    /// Replace the rule by its k-th power before anything else, so that
    /// singleton children are split instead of taking the right half.
    #[arg(long, global = true, value_name = "k", value_parser = clap::value_parser!(u32).range(1..))]
    power: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Rule file, or `builtin:<name>`.
    rule: String,
    /// Prototile id.
    #[arg(short)]
    p: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the geometric checks on a rule.
    Validate {
        rule: String,
    },
    /// The n-supertile in visit order.
    Supertile {
        #[command(flatten)]
        target: Target,
        #[arg(short)]
        n: u32,
        /// Write JSON here (`-` for stdout, the default).
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// The level-n intervals of the Cantor hierarchy.
    Cantor {
        #[command(flatten)]
        target: Target,
        #[arg(short)]
        n: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The n-th approximant polyline.
    Approximant {
        #[command(flatten)]
        target: Target,
        #[arg(short)]
        n: u32,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
        /// Close the loop and fill it (even-odd).
        #[arg(long)]
        fill: bool,
        /// Seed patch file, or `builtin:<name>`; replaces `-p`.
        #[arg(long)]
        seed_patch: Option<String>,
    },
    /// Evaluate the curve at a rational parameter.
    Eval {
        #[command(flatten)]
        target: Target,
        /// Parameter as `a/b` or a decimal.
        #[arg(short, allow_hyphen_values = true)]
        t: String,
        #[arg(short)]
        n: u32,
    },
    /// Quantitative checks; without `-p` every prototile is checked.
    Check {
        #[command(flatten)]
        target: Target,
        /// Continuity modulus at Cantor level N.
        #[arg(long, value_name = "N")]
        continuity: Option<u32>,
        /// Grid coverage of the depth-n approximant on an m x m grid.
        #[arg(long, num_args = 2, value_names = ["n", "m"])]
        cover: Option<Vec<u32>>,
        /// Diameter decay up to depth N.
        #[arg(long, value_name = "N")]
        decay: Option<u32>,
    },
    /// Fixed placement, conditions and the nested dense set.
    Fractal {
        #[command(flatten)]
        target: Target,
        /// Power of the substitution.
        #[arg(short)]
        n: u32,
        #[arg(long, default_value_t = 2)]
        iterations: u32,
        #[arg(long, default_value_t = 512)]
        resolution: usize,
        /// Index into the fixed placements; default is the first interior one.
        #[arg(long)]
        placement: Option<usize>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::Validation(_) | Error::Schema { .. }) => EXIT_CHECK,
                Some(Error::ConditionsUnmet(_)) => EXIT_CONDITIONS,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn read_rule(cli: &Cli, spec: &str, validate: bool) -> Result<LoadedRule> {
    let variant = cli.order.as_deref();
    let mut loaded = if let Some(name) = spec.strip_prefix("builtin:") {
        builtin_rule(name, variant)?
    } else {
        let bytes = fs::read(spec).with_context(|| format!("reading {spec}"))?;
        let loaded = load_substitution(&bytes, variant).with_context(|| format!("loading {spec}"))?;
        if validate {
            let report = validate_substitution(&loaded.rule, Tolerance::default());
            if !report.passed() {
                return Err(Error::Validation(report).into());
            }
        }
        loaded
    };
    if let Some(k) = cli.power {
        let (rule, order) = power(&loaded.rule, &loaded.order, k, cli.cap)?;
        loaded.rule = rule;
        loaded.order = order;
    }
    Ok(loaded)
}

fn proto(loaded: &LoadedRule, p: &Option<String>) -> Result<TileId> {
    let name = p.as_deref().ok_or_else(|| anyhow!("a prototile is required (-p <id>)"))?;
    Ok(loaded.rule.id_of(name)?)
}

/// Writes to `path`, or stdout when it is `-`.
fn write_out(path: &Path, text: &str) -> Result<()> {
    if path == Path::new("-") {
        print!("{text}");
        Ok(())
    } else {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

fn to_json(v: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: &Cli) -> Result<u8> {
    let tol = Tolerance::default();
    match &cli.command {
        Command::Validate { rule } => {
            let loaded = read_rule(cli, rule, false)?;
            let report = validate_substitution(&loaded.rule, tol);
            print!("{report}");
            Ok(if report.passed() { 0 } else { EXIT_CHECK })
        }
        Command::Supertile { target, n, json, svg } => {
            let loaded = read_rule(cli, &target.rule, true)?;
            let p = proto(&loaded, &target.p)?;
            let tiles = ordered_supertile(&loaded.rule, &loaded.order, p, *n, cli.cap)?;
            if let Some(path) = svg {
                let objects: Vec<SvgObject> = tiles
                    .iter()
                    .map(|t| SvgObject::Region {
                        points: loaded.rule.support(&t.tile).vertices().to_vec(),
                        class: t.tile.proto.0,
                    })
                    .collect();
                write_out(path, &emit_svg(&objects, &RenderOptions::default())?)?;
            }
            if json.is_some() || svg.is_none() {
                let list: Vec<Value> = tiles
                    .iter()
                    .map(|t| {
                        json!({
                            "address": t.address,
                            "proto": loaded.rule.name_of(t.tile.proto),
                            "offset": t.tile.offset,
                            "vertices": loaded.rule.support(&t.tile).vertices(),
                        })
                    })
                    .collect();
                let doc = json!({ "rule": loaded.rule.name(), "p": loaded.rule.name_of(p), "n": n, "tiles": list });
                write_out(json.as_deref().unwrap_or(Path::new("-")), &to_json(&doc)?)?;
            }
            Ok(0)
        }
        Command::Cantor { target, n, json } => {
            let loaded = read_rule(cli, &target.rule, true)?;
            let p = proto(&loaded, &target.p)?;
            let level = cantor_level(&loaded.rule, &loaded.order, p, *n, cli.cap)?;
            let doc = json!({
                "rule": loaded.rule.name(),
                "p": loaded.rule.name_of(p),
                "n": n,
                "max_length": format_rational(&level.max_length()),
                "intervals": level_json(&loaded.rule, &level),
            });
            write_out(json.as_deref().unwrap_or(Path::new("-")), &to_json(&doc)?)?;
            Ok(0)
        }
        Command::Approximant { target, n, svg, json, fill, seed_patch } => {
            let loaded = read_rule(cli, &target.rule, true)?;
            let seed = match seed_patch {
                Some(s) => match s.strip_prefix("builtin:") {
                    Some(name) => builtin_seed(name, &loaded)?,
                    None => {
                        let bytes = fs::read(s).with_context(|| format!("reading {s}"))?;
                        parse_seed(&bytes, &loaded.rule)?
                    }
                },
                None => Seed::Tile(proto(&loaded, &target.p)?),
            };
            let cs = CurveSpec::new(loaded.rule.clone(), loaded.order.clone(), seed, tol)?.with_cap(cli.cap);
            let appr = approximant(&cs, *n)?;
            if let Some(path) = svg {
                let object = if *fill {
                    SvgObject::Region { points: closed_region(&appr, tol)?.vertices().to_vec(), class: 0 }
                } else {
                    SvgObject::Polyline { points: appr.vertices.clone(), class: 0 }
                };
                write_out(path, &emit_svg(&[object], &RenderOptions::default())?)?;
            }
            if json.is_some() || svg.is_none() {
                write_out(json.as_deref().unwrap_or(Path::new("-")), &to_json(&serde_json::to_value(&appr)?)?)?;
            }
            Ok(0)
        }
        Command::Eval { target, t, n } => {
            let loaded = read_rule(cli, &target.rule, true)?;
            let p = proto(&loaded, &target.p)?;
            let cs = CurveSpec::single(loaded.rule.clone(), loaded.order.clone(), p)?.with_cap(cli.cap);
            let t: BigRational = parse_rational(t)?;
            let r = eval(&cs, &t, *n)?;
            let doc = json!({ "t": format_rational(&t), "n": n, "point": r.point, "error_bound": r.error_bound, "address": r.address });
            print!("{}", to_json(&doc)?);
            Ok(0)
        }
        Command::Check { target, continuity, cover, decay } => {
            let loaded = read_rule(cli, &target.rule, true)?;
            let protos: Vec<TileId> = match &target.p {
                Some(_) => vec![proto(&loaded, &target.p)?],
                None => loaded.rule.ids().collect(),
            };
            if continuity.is_none() && cover.is_none() && decay.is_none() {
                bail!("nothing to check; pass --continuity, --cover or --decay");
            }
            let mut ok = true;
            let mut out = serde_json::Map::new();
            out.insert("rule".into(), json!(loaded.rule.name()));
            if let Some(k) = decay {
                let all = diameter_decay(&loaded.rule, *k);
                let mut per = serde_json::Map::new();
                let mut pass = is_non_increasing(&all);
                for &p in &protos {
                    let seq = diameter_decay_from(&loaded.rule, p, *k);
                    pass &= is_non_increasing(&seq);
                    per.insert(loaded.rule.name_of(p).into(), json!(seq));
                }
                ok &= pass;
                out.insert("decay".into(), json!({ "max": all, "per_prototile": per, "non_increasing": pass }));
            }
            if continuity.is_some() || cover.is_some() {
                let mut per = serde_json::Map::new();
                for &p in &protos {
                    let cs = CurveSpec::single(loaded.rule.clone(), loaded.order.clone(), p)?.with_cap(cli.cap);
                    let mut entry = serde_json::Map::new();
                    if let Some(k) = continuity {
                        let r = continuity_check(&cs, *k)?;
                        ok &= r.passed;
                        entry.insert("continuity".into(), serde_json::to_value(&r)?);
                    }
                    if let Some(v) = cover {
                        let r = cover_check(&cs, v[0], v[1] as usize)?;
                        ok &= r.passed;
                        entry.insert("cover".into(), serde_json::to_value(&r)?);
                    }
                    per.insert(loaded.rule.name_of(p).into(), Value::Object(entry));
                }
                out.insert("prototiles".into(), Value::Object(per));
            }
            out.insert("passed".into(), json!(ok));
            print!("{}", to_json(&Value::Object(out))?);
            Ok(if ok { 0 } else { EXIT_CHECK })
        }
        Command::Fractal { target, n, iterations, resolution, placement, svg, json } => {
            let loaded = read_rule(cli, &target.rule, true)?;
            let p = proto(&loaded, &target.p)?;
            let cs = CurveSpec::single(loaded.rule.clone(), loaded.order.clone(), p)?.with_cap(cli.cap);
            let fps = find_fixed_placements(&loaded.rule, p, *n, cli.cap)?;
            let fp = match placement {
                Some(i) => *fps.get(*i).ok_or_else(|| anyhow!("placement {i} out of range ({} found)", fps.len()))?,
                None => *fps
                    .iter()
                    .find(|f| check_interior(f, &loaded.rule, tol))
                    .or(fps.first())
                    .ok_or_else(|| Error::ConditionsUnmet(vec!["(1) fixed placement".into()]))?,
            };
            let levels = (*iterations).max(1);
            let conditions = check_conditions(&fp, &cs, *resolution, ((levels - 1) * n + 1).max(*n))?;
            let unmet = conditions.unmet();
            let mut doc = json!({ "placement": fp, "placements_found": fps.len(), "conditions": conditions });
            if !unmet.is_empty() {
                print!("{}", to_json(&doc)?);
                return Err(Error::ConditionsUnmet(unmet).into());
            }
            let opts = DenseSetOptions { iterations: *iterations, resolution: *resolution, window: None };
            let build = build_dense_set(&fp, &cs, &opts)?;
            let mut census = vec![0usize; build.class_count];
            for piece in &build.pieces {
                census[piece.class] += 1;
            }
            doc["regions"] = json!(build.regions.iter().map(Vec::len).collect::<Vec<_>>());
            doc["pieces"] = json!(build.pieces.len());
            doc["class_count"] = json!(build.class_count);
            doc["class_census"] = json!(census);
            if let Some(path) = svg {
                let mut objects: Vec<SvgObject> = build
                    .regions
                    .iter()
                    .rev()
                    .enumerate()
                    .map(|(i, r)| SvgObject::Region { points: r.clone(), class: i })
                    .collect();
                objects.extend(build.pieces.iter().map(|pc| SvgObject::Outline {
                    points: loaded.rule.support(&pc.tile).vertices().to_vec(),
                    class: pc.class,
                }));
                let opts = RenderOptions { stroke_width: 0.5, ..RenderOptions::default() };
                write_out(path, &emit_svg(&objects, &opts)?)?;
            }
            write_out(json.as_deref().unwrap_or(Path::new("-")), &to_json(&doc)?)?;
            Ok(0)
        }
    }
}
