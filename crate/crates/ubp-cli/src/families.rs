use std::path::Path;

use ubp_family::parse_family;
use ubp_geometry::UpdateFamily;

use crate::Failure;

const BUNDLED: [(&str, &str); 5] = [
    ("twonbr", include_str!("../data/twonbr.json")),
    ("threenbr", include_str!("../data/threenbr.json")),
    ("onenbr", include_str!("../data/onenbr.json")),
    ("duarte", include_str!("../data/duarte.json")),
    ("east", include_str!("../data/east.json")),
];

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// Bundled family text by name, with or without a `.json` suffix.
pub fn bundled(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUNDLED.iter().find(|(n, _)| *n == stem).map(|(_, t)| *t)
}

/// An existing file wins over a bundled name.
pub fn load_family(source: &str) -> Result<UpdateFamily, Failure> {
    let text = if Path::new(source).is_file() {
        std::fs::read(source).map_err(|e| Failure::Invalid(format!("{source}: {e}")))?
    } else if let Some(t) = bundled(source) {
        t.as_bytes().to_vec()
    } else {
        let names: Vec<_> = bundled_names().collect();
        return Err(Failure::Invalid(format!(
            "{source}: no such file or bundled family ({})",
            names.join(", ")
        )));
    };
    parse_family(&text).map_err(|e| Failure::Invalid(format!("{source}: {} [{}]", e, e.code())))
}
