//! Reading and writing: the JSON rule format, the builtin catalog and SVG.

pub mod builtins;
pub mod expr;
pub mod format;
pub mod svg;

pub use builtins::{builtin_rule, builtin_seed, BUILTIN_RULES, BUILTIN_SEEDS};
pub use format::{emit_json, load_substitution, parse_seed, parse_substitution, LoadedRule, SubstitutionFile};
pub use svg::{emit_svg, RenderOptions, SvgObject};
