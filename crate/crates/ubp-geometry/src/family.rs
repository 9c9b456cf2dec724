use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::direction::Site;

/// Largest accepted absolute value of an offset coordinate.
pub const MAX_OFFSET: i64 = 1 << 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("family has no rules")]
    NoRules,
    #[error("rule {0} contains the origin")]
    OriginInRule(usize),
    #[error("rule {0} is empty")]
    EmptyRule(usize),
    #[error("rule {rule} lists offset ({x},{y}) twice")]
    DuplicateOffset { rule: usize, x: i64, y: i64 },
    #[error("rule {rule} has offset ({x},{y}) beyond the 2^30 bound")]
    OffsetOverflow { rule: usize, x: i64, y: i64 },
}

/// A validated update family: a site `x` becomes infected once `x + X` is
/// fully infected for some rule `X`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FamilyJson", into = "FamilyJson")]
pub struct UpdateFamily {
    rules: Vec<Vec<Site>>,
    range: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilyJson {
    pub rules: Vec<Vec<Site>>,
}

impl TryFrom<FamilyJson> for UpdateFamily {
    type Error = FamilyError;
    fn try_from(j: FamilyJson) -> Result<Self, FamilyError> {
        UpdateFamily::new(j.rules)
    }
}

impl From<UpdateFamily> for FamilyJson {
    fn from(f: UpdateFamily) -> Self {
        FamilyJson { rules: f.rules }
    }
}

impl UpdateFamily {
    /// Validates the rules. Offsets keep their given order within each rule.
    pub fn new(rules: Vec<Vec<Site>>) -> Result<UpdateFamily, FamilyError> {
        if rules.is_empty() {
            return Err(FamilyError::NoRules);
        }
        let mut range = 0;
        for (i, rule) in rules.iter().enumerate() {
            if rule.is_empty() {
                return Err(FamilyError::EmptyRule(i));
            }
            for (j, &(x, y)) in rule.iter().enumerate() {
                if x.abs() > MAX_OFFSET || y.abs() > MAX_OFFSET {
                    return Err(FamilyError::OffsetOverflow { rule: i, x, y });
                }
                if (x, y) == (0, 0) {
                    return Err(FamilyError::OriginInRule(i));
                }
                if rule[..j].contains(&(x, y)) {
                    return Err(FamilyError::DuplicateOffset { rule: i, x, y });
                }
                range = range.max(x.abs()).max(y.abs());
            }
        }
        Ok(UpdateFamily { rules, range })
    }

    pub fn rules(&self) -> &[Vec<Site>] {
        &self.rules
    }

    /// Largest Chebyshev norm of any offset.
    pub fn range(&self) -> i64 {
        self.range
    }

    /// Every offset of every rule, deduplicated, in lexicographic order.
    pub fn all_offsets(&self) -> Vec<Site> {
        let mut v: Vec<Site> = self.rules.iter().flatten().copied().collect();
        v.sort();
        v.dedup();
        v
    }

    /// The family `{−X : X ∈ U}`.
    pub fn reflected(&self) -> UpdateFamily {
        let rules = self
            .rules
            .iter()
            .map(|r| r.iter().map(|&(x, y)| (-x, -y)).collect())
            .collect();
        UpdateFamily {
            rules,
            range: self.range,
        }
    }

    fn from_subsets(base: &[Site], size: usize) -> UpdateFamily {
        let mut rules = Vec::new();
        let n = base.len();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize == size {
                rules.push((0..n).filter(|i| mask >> i & 1 == 1).map(|i| base[i]).collect());
            }
        }
        UpdateFamily::new(rules).expect("subsets of nonzero offsets are valid")
    }

    /// Every 2-subset of the four nearest neighbours.
    pub fn two_neighbour() -> UpdateFamily {
        Self::from_subsets(&NEAREST, 2)
    }

    /// Every 3-subset of the four nearest neighbours.
    pub fn three_neighbour() -> UpdateFamily {
        Self::from_subsets(&NEAREST, 3)
    }

    /// The four nearest neighbours as singleton rules.
    pub fn one_neighbour() -> UpdateFamily {
        Self::from_subsets(&NEAREST, 1)
    }

    /// Every 2-subset of west, north and south.
    pub fn duarte() -> UpdateFamily {
        Self::from_subsets(&[(-1, 0), (0, 1), (0, -1)], 2)
    }

    /// The single rule `{(1,0)}`: infection moves one step west per generation.
    pub fn east() -> UpdateFamily {
        UpdateFamily::new(vec![vec![(1, 0)]]).expect("valid")
    }
}

const NEAREST: [Site; 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_errors() {
        assert_eq!(UpdateFamily::new(vec![vec![(0, 0)]]), Err(FamilyError::OriginInRule(0)));
        assert_eq!(
            UpdateFamily::new(vec![vec![(1, 0)], vec![]]),
            Err(FamilyError::EmptyRule(1))
        );
        assert_eq!(
            UpdateFamily::new(vec![vec![(1, 0), (1, 0)]]),
            Err(FamilyError::DuplicateOffset { rule: 0, x: 1, y: 0 })
        );
        assert!(matches!(
            UpdateFamily::new(vec![vec![(MAX_OFFSET + 1, 0)]]),
            Err(FamilyError::OffsetOverflow { rule: 0, .. })
        ));
        assert_eq!(UpdateFamily::new(vec![]), Err(FamilyError::NoRules));
    }

    #[test]
    fn named_families() {
        assert_eq!(UpdateFamily::two_neighbour().rules().len(), 6);
        assert_eq!(UpdateFamily::three_neighbour().rules().len(), 4);
        assert_eq!(UpdateFamily::one_neighbour().rules().len(), 4);
        assert_eq!(UpdateFamily::duarte().rules().len(), 3);
        assert_eq!(UpdateFamily::east().range(), 1);
    }
}
