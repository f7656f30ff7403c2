use serde::{Deserialize, Serialize};

use super::{FormMeta, Level, NearlyHolomorphicForm, QExpansion};
use crate::arith;
use crate::error::{Error, Result};
use crate::ring::RationalField;

/// On-disk form: coefficients are decimal rationals `"a"` or `"a/b"`, from `q^0`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FormFile {
    pub weight: i64,
    pub level: u64,
    #[serde(default = "triv")]
    pub character: String,
    pub coefficients: Vec<String>,
}

fn triv() -> String {
    "triv".into()
}

pub fn form_from_json(text: &str) -> Result<NearlyHolomorphicForm<RationalField>> {
    let file: FormFile = serde_json::from_str(text)?;
    if file.level == 0 {
        return Err(Error::Parse("level must be positive".into()));
    }
    let coeffs = file
        .coefficients
        .iter()
        .map(|s| arith::parse_rational(s).ok_or_else(|| Error::Parse(format!("bad coefficient {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let meta = FormMeta::new(file.weight, Level::new(file.level), &file.character, "file");
    Ok(NearlyHolomorphicForm::holomorphic(QExpansion::new(RationalField, coeffs), meta))
}

pub fn form_to_json(q: &QExpansion<RationalField>, weight: i64, level: u64, character: &str) -> String {
    let file = FormFile {
        weight,
        level,
        character: character.into(),
        coefficients: q.coeffs.iter().map(arith::rational_to_string).collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qexp::delta;

    #[test]
    fn round_trip() {
        let d = delta(20);
        let text = form_to_json(&d, 12, 1, "triv");
        let back = form_from_json(&text).unwrap();
        assert_eq!(back.layers[0], d.coeffs);
        assert_eq!(back.meta.weight, 12);
    }

    #[test]
    fn rejects_garbage() {
        let bad = r#"{"weight": 2, "level": 11, "coefficients": ["1", "x"]}"#;
        assert!(matches!(form_from_json(bad), Err(Error::Parse(_))));
    }
}
