use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hardware design rules (a)–(g).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    /// (a) block abuts its designated outline terminals.
    Boundary,
    /// (b) voltage-island members share an edge.
    Grouping,
    /// (c) paired blocks on different dies overlap in projection.
    Alignment,
    /// (d) fixed blocks keep their given position and shape.
    Preplacement,
    /// (e)
    NonOverlap,
    /// (f)
    Outline,
    /// (g) soft-block aspect ratio stays in range.
    Shape,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::Boundary,
        Rule::Grouping,
        Rule::Alignment,
        Rule::Preplacement,
        Rule::NonOverlap,
        Rule::Outline,
        Rule::Shape,
    ];

    pub fn letter(self) -> char {
        (b'a' + self as u8) as char
    }

    pub fn from_letter(c: char) -> Option<Rule> {
        Rule::ALL.iter().copied().find(|r| r.letter() == c)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// Set of rules, written as the concatenated rule letters (`"acefg"`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct RuleSet(u8);

impl RuleSet {
    pub const EMPTY: RuleSet = RuleSet(0);

    pub fn of(rules: &[Rule]) -> Self {
        RuleSet(rules.iter().fold(0, |acc, r| acc | r.bit()))
    }

    pub fn contains(self, rule: Rule) -> bool {
        self.0 & rule.bit() != 0
    }

    pub fn with(self, rule: Rule) -> Self {
        RuleSet(self.0 | rule.bit())
    }

    pub fn without(self, rule: Rule) -> Self {
        RuleSet(self.0 & !rule.bit())
    }

    pub fn iter(self) -> impl Iterator<Item = Rule> {
        Rule::ALL.into_iter().filter(move |r| self.contains(*r))
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.iter().try_for_each(|r| write!(f, "{}", r.letter()))
    }
}

impl From<RuleSet> for String {
    fn from(s: RuleSet) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for RuleSet {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.chars().try_fold(RuleSet::EMPTY, |acc, c| {
            Rule::from_letter(c)
                .map(|r| acc.with(r))
                .ok_or_else(|| Error::UnknownRule(c.to_string()))
        })
    }
}

/// Binarization thresholds for the rule masks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Largest admissible block-terminal distance, in cells.
    pub terminal: f64,
    /// Adjacency-length threshold; zero means "strictly positive".
    pub grouping: f64,
    /// Required intersection area as a fraction of the smaller block's area.
    pub alignment_frac: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            terminal: 0.0,
            grouping: 0.0,
            alignment_frac: 0.1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weights {
    pub alignment: f64,
    pub overlap: f64,
    pub hpwl: f64,
    pub adjacency: f64,
    pub distance: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights {
            alignment: 0.5,
            overlap: 0.5,
            hpwl: 1.0,
            adjacency: 4.0,
            distance: 4.0,
        }
    }
}

impl Weights {
    pub fn uniform(w: f64) -> Self {
        Weights {
            alignment: w,
            overlap: w,
            hpwl: w,
            adjacency: w,
            distance: w,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskProfile {
    /// Task number (1–3) or 0 for a custom profile.
    pub id: u8,
    pub rules: RuleSet,
    /// Rules whose masks are still built as features but never restrict the
    /// action space (ablation of the binary mask only).
    #[serde(default)]
    pub feature_only: RuleSet,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub weights: Weights,
}

impl TaskProfile {
    /// Rules every task enforces.
    pub const COMMON: [Rule; 4] = [
        Rule::Alignment,
        Rule::NonOverlap,
        Rule::Outline,
        Rule::Shape,
    ];

    pub fn task(id: u8) -> Result<Self> {
        let extra: &[Rule] = match id {
            1 => &[Rule::Boundary],
            2 => &[Rule::Grouping],
            3 => &[Rule::Boundary, Rule::Grouping, Rule::Preplacement],
            _ => return Err(Error::Invalid(format!("unknown task {id}"))),
        };
        let rules = extra
            .iter()
            .fold(RuleSet::of(&Self::COMMON), |acc, r| acc.with(*r));
        Ok(TaskProfile {
            id,
            rules,
            feature_only: RuleSet::EMPTY,
            thresholds: Thresholds::default(),
            weights: Weights::default(),
        })
    }

    /// Custom profile; the common rules are always added.
    pub fn custom(rules: RuleSet) -> Self {
        let rules = Self::COMMON.iter().fold(rules, |acc, r| acc.with(*r));
        TaskProfile {
            id: 0,
            rules,
            feature_only: RuleSet::EMPTY,
            thresholds: Thresholds::default(),
            weights: Weights::default(),
        }
    }

    pub fn enabled(&self, rule: Rule) -> bool {
        self.rules.contains(rule)
    }

    /// Whether the binary mask of `rule` filters actions.
    pub fn constrains(&self, rule: Rule) -> bool {
        self.enabled(rule) && !self.feature_only.contains(rule)
    }

    pub fn with_feature_only(mut self, rule: Rule) -> Self {
        self.feature_only = self.feature_only.with(rule);
        self
    }
}
