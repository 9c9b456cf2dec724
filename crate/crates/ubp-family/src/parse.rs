use thiserror::Error;
use ubp_geometry::{FamilyError, FamilyJson, UpdateFamily};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("malformed family JSON: {0}")]
    Malformed(String),
    #[error(transparent)]
    Invalid(#[from] FamilyError),
}

impl ParseError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Malformed(_) => "malformed_json",
            ParseError::Invalid(FamilyError::NoRules) => "no_rules",
            ParseError::Invalid(FamilyError::OriginInRule(_)) => "origin_in_rule",
            ParseError::Invalid(FamilyError::EmptyRule(_)) => "empty_rule",
            ParseError::Invalid(FamilyError::DuplicateOffset { .. }) => "duplicate_offset",
            ParseError::Invalid(FamilyError::OffsetOverflow { .. }) => "offset_overflow",
        }
    }

    /// Index of the offending rule, when the error is about one rule.
    pub fn rule_index(&self) -> Option<usize> {
        match self {
            ParseError::Invalid(FamilyError::OriginInRule(i)) | ParseError::Invalid(FamilyError::EmptyRule(i)) => {
                Some(*i)
            }
            ParseError::Invalid(FamilyError::DuplicateOffset { rule, .. })
            | ParseError::Invalid(FamilyError::OffsetOverflow { rule, .. }) => Some(*rule),
            _ => None,
        }
    }
}

/// Parses `{"rules": [[[x,y],...],...]}`.
pub fn parse_family(text: &[u8]) -> Result<UpdateFamily, ParseError> {
    let json: FamilyJson = serde_json::from_slice(text).map_err(|e| ParseError::Malformed(e.to_string()))?;
    Ok(UpdateFamily::new(json.rules)?)
}

pub fn family_to_json(family: &UpdateFamily) -> String {
    serde_json::to_string(family).expect("families serialise")
}
