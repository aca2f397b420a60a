//! JSON form of [`Formula`]: one object per node, discriminated by `kind`.
//!
//! ```json
//! {"kind":"imp","antecedent":{"kind":"var","name":"a"},"consequent":{"kind":"bot"}}
//! ```
//!
//! Kinds: `var` (`name`), `top`, `bot`, `and` / `or` (`left`, `right`),
//! `imp` (`antecedent`, `consequent`), `mu` / `nu` (`binder`, `body`).

use serde::{Deserialize, Serialize};

use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum JsonFormula {
    Var {
        name: String,
    },
    Top,
    Bot,
    And {
        left: Box<JsonFormula>,
        right: Box<JsonFormula>,
    },
    Or {
        left: Box<JsonFormula>,
        right: Box<JsonFormula>,
    },
    Imp {
        antecedent: Box<JsonFormula>,
        consequent: Box<JsonFormula>,
    },
    Mu {
        binder: String,
        body: Box<JsonFormula>,
    },
    Nu {
        binder: String,
        body: Box<JsonFormula>,
    },
}

impl From<&Formula> for JsonFormula {
    fn from(f: &Formula) -> Self {
        let b = |g: &Formula| Box::new(JsonFormula::from(g));
        match f {
            Formula::Var(name) => JsonFormula::Var { name: name.clone() },
            Formula::Top => JsonFormula::Top,
            Formula::Bot => JsonFormula::Bot,
            Formula::And(l, r) => JsonFormula::And { left: b(l), right: b(r) },
            Formula::Or(l, r) => JsonFormula::Or { left: b(l), right: b(r) },
            Formula::Imp(a, c) => JsonFormula::Imp {
                antecedent: b(a),
                consequent: b(c),
            },
            Formula::Mu(x, body) => JsonFormula::Mu {
                binder: x.clone(),
                body: b(body),
            },
            Formula::Nu(x, body) => JsonFormula::Nu {
                binder: x.clone(),
                body: b(body),
            },
        }
    }
}

impl From<JsonFormula> for Formula {
    fn from(j: JsonFormula) -> Self {
        let f = |g: Box<JsonFormula>| Formula::from(*g);
        match j {
            JsonFormula::Var { name } => Formula::Var(name),
            JsonFormula::Top => Formula::Top,
            JsonFormula::Bot => Formula::Bot,
            JsonFormula::And { left, right } => Formula::and(f(left), f(right)),
            JsonFormula::Or { left, right } => Formula::or(f(left), f(right)),
            JsonFormula::Imp {
                antecedent,
                consequent,
            } => Formula::imp(f(antecedent), f(consequent)),
            JsonFormula::Mu { binder, body } => Formula::mu(binder, f(body)),
            JsonFormula::Nu { binder, body } => Formula::nu(binder, f(body)),
        }
    }
}

pub fn to_json(f: &Formula) -> serde_json::Value {
    serde_json::to_value(JsonFormula::from(f)).expect("formula serialization is infallible")
}

pub fn to_json_string(f: &Formula) -> String {
    serde_json::to_string(&JsonFormula::from(f)).expect("formula serialization is infallible")
}

pub fn from_json_str(s: &str) -> Result<Formula, serde_json::Error> {
    serde_json::from_str::<JsonFormula>(s).map(Formula::from)
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    #[test]
    fn shape_of_json() {
        let f = parse("a -> F").unwrap();
        assert_eq!(
            to_json_string(&f),
            r#"{"kind":"imp","antecedent":{"kind":"var","name":"a"},"consequent":{"kind":"bot"}}"#
        );
    }

    #[test]
    fn roundtrip_with_binder() {
        let f = parse("nu x. mu y. x /\\ (b \\/ y)").unwrap();
        assert_eq!(from_json_str(&to_json_string(&f)).unwrap(), f);
    }

    #[test]
    fn rejects_unknown_kind() {
        assert!(from_json_str(r#"{"kind":"xor"}"#).is_err());
    }
}
