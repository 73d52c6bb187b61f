use crate::error::{Error, Result};
use crate::model::{parse_model_spec, ModelSpec};

/// Bundled spec documents, in report order.
const BUNDLED: &[(&str, &str)] = &[
    ("h_true", include_str!("../../specs/h_true.toml")),
    ("h1", include_str!("../../specs/h1.toml")),
    ("h2", include_str!("../../specs/h2.toml")),
    ("h3", include_str!("../../specs/h3.toml")),
    ("glm1", include_str!("../../specs/glm1.toml")),
    ("glm2", include_str!("../../specs/glm2.toml")),
    ("glm3", include_str!("../../specs/glm3.toml")),
    ("glm4", include_str!("../../specs/glm4.toml")),
    ("glm5", include_str!("../../specs/glm5.toml")),
    ("h_rw1", include_str!("../../specs/h_rw1.toml")),
    ("h_rw2", include_str!("../../specs/h_rw2.toml")),
    ("h_rw3", include_str!("../../specs/h_rw3.toml")),
    ("glm6", include_str!("../../specs/glm6.toml")),
    ("glm7", include_str!("../../specs/glm7.toml")),
    ("glm8", include_str!("../../specs/glm8.toml")),
];

/// Bundled experiment plans.
const PLANS: &[(&str, &str)] = &[
    ("synthetic", include_str!("../../plans/synthetic.toml")),
    ("real_world", include_str!("../../plans/real_world.toml")),
];

/// Models fitted to the synthetic downtime data.
pub const SYNTHETIC_ROSTER: &[&str] = &[
    "h_true", "h1", "h2", "h3", "glm1", "glm2", "glm3", "glm4", "glm5",
];

/// Models fitted to the three-covariate uptime data.
pub const REAL_WORLD_ROSTER: &[&str] = &["h_rw1", "h_rw2", "h_rw3", "glm6", "glm7", "glm8"];

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// TOML text of a bundled spec.
pub fn builtin_source(name: &str) -> Option<&'static str> {
    BUNDLED
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, s)| *s)
}

pub fn builtin_plan_names() -> impl Iterator<Item = &'static str> {
    PLANS.iter().map(|(n, _)| *n)
}

/// TOML text of a bundled experiment plan.
pub fn builtin_plan_source(name: &str) -> Option<&'static str> {
    PLANS
        .iter()
        .find(|(n, _)| n.eq_ignore_ascii_case(name))
        .map(|(_, s)| *s)
}

pub fn builtin_spec(name: &str) -> Result<ModelSpec> {
    let text = builtin_source(name).ok_or_else(|| {
        let known: Vec<_> = builtin_names().collect();
        Error::Specification(format!(
            "no bundled model `{name}` (known: {})",
            known.join(", ")
        ))
    })?;
    parse_model_spec(text)
}

/// Every bundled model, in catalog order.
pub fn builtin_specs() -> Result<Vec<ModelSpec>> {
    builtin_names().map(builtin_spec).collect()
}
