use std::path::{Path, PathBuf};

use rankin_core::measures::{required_input, RankinContext};
use rankin_core::qexp::{builtin_form, form_from_json, NearlyHolomorphicForm};
use rankin_core::{Error, RationalField, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_BUDGET: u128 = 200_000_000;

/// Everything a run depends on. Any field left out of both the flags and the
/// config file takes the value from [`Scenario::default`].
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct Scenario {
    /// Builtin name (`delta`, `e4delta`, `eta2eta11`, `eisenstein:k`) or a form file.
    pub f: String,
    pub g: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub p: u64,
    pub nu_max: u32,
    pub b: u64,
    pub r_max: u32,
    /// Characters mod `p^nu_max` for the Mellin report.
    pub chi: Vec<String>,
    pub precision: i64,
    /// Multiply-add budget; a plan over budget is refused before any work.
    pub budget: u128,
    /// Coefficients kept after `U^(2nu)`, at every level.
    pub out_len: usize,
    /// Truncation of the exact two-path and refinement checks.
    pub check_len: usize,
    /// Centre of the shrinking opens in the growth table.
    pub center: u64,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            f: "delta".into(),
            g: "eta2eta11".into(),
            n: 11,
            p: 7,
            nu_max: 1,
            b: 2,
            r_max: 3,
            chi: vec!["triv".into()],
            precision: 40,
            budget: DEFAULT_BUDGET,
            out_len: 8,
            check_len: 21,
            center: 1,
            out: None,
        }
    }
}

/// Truncation for one level, worked backwards from the requested output.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LevelPlan {
    pub nu: u32,
    pub out_len: usize,
    pub input_len: usize,
    pub cost: u128,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Plan {
    pub levels: Vec<LevelPlan>,
    pub g_len: usize,
    pub total_cost: u128,
    pub budget: u128,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    fn check_shape(&self) -> Result<()> {
        if self.nu_max == 0 {
            return Err(Error::Domain("nu_max must be at least 1".into()));
        }
        if self.out_len < 2 || self.check_len < 2 {
            return Err(Error::InsufficientTruncation("out_len and check_len must be at least 2".into()));
        }
        Ok(())
    }

    /// Cost of every sweep `certify` runs: both open kinds at every level,
    /// plus the growth table.
    pub fn plan(&self) -> Result<Plan> {
        self.check_shape()?;
        let mut levels = Vec::new();
        for nu in 1..=self.nu_max {
            let sweep: u128 =
                (0..=self.r_max).map(|r| rankin_core::measures::estimate_cost(self.p, nu, r, self.out_len)).sum();
            levels.push(LevelPlan {
                nu,
                out_len: self.out_len,
                input_len: required_input(self.p, nu, self.out_len),
                cost: 3 * sweep,
            });
        }
        let fourier: u128 =
            (0..=self.r_max).map(|r| rankin_core::measures::estimate_cost(self.p, 1, r, self.check_len)).sum();
        let g_len = levels
            .iter()
            .map(|l| l.input_len)
            .chain([required_input(self.p, 1, self.check_len), self.check_len])
            .max()
            .unwrap_or(0);
        let total_cost = levels.iter().map(|l| l.cost).sum::<u128>() + fourier;
        Ok(Plan { levels, g_len, total_cost, budget: self.budget })
    }

    /// Builds the context with `g` long enough for the whole plan.
    pub fn context(&self, plan: &Plan) -> Result<RankinContext> {
        let f = load_form(&self.f, self.p as usize + 2)?;
        let g = load_form(&self.g, plan.g_len)?;
        RankinContext::new(&f, &g, self.p, self.n, self.b, self.precision)
    }
}

/// A builtin generated to `len`, or a form file read as is.
pub fn load_form(source: &str, len: usize) -> Result<NearlyHolomorphicForm<RationalField>> {
    match builtin_form(source) {
        Ok(b) => b.form(len),
        Err(_) if Path::new(source).exists() => form_from_json(&std::fs::read_to_string(source)?),
        Err(e) => Err(Error::Parse(format!("{source:?} is neither a builtin form nor a readable file ({e})"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_overrides_defaults() {
        let s = Scenario::from_toml("p = 13\nN = 1\ng = \"eisenstein:4\"\nchi = [\"quad\", \"[1]\"]\n").unwrap();
        assert_eq!((s.p, s.n, s.r_max), (13, 1, 3));
        assert_eq!(s.chi, vec!["quad".to_string(), "[1]".to_string()]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(Scenario::from_toml("prime = 7\n").is_err());
    }

    #[test]
    fn plan_back_propagates_truncation() {
        let s = Scenario { nu_max: 2, out_len: 5, ..Scenario::default() };
        let plan = s.plan().unwrap();
        assert_eq!(plan.levels[0].input_len, 4 * 49 + 1);
        assert_eq!(plan.levels[1].input_len, 4 * 2401 + 1);
        assert_eq!(plan.g_len, 9605);
    }
}
