//! Named constant hierarchies such as `0 < alpha << beta << gamma`.
//!
//! At desk scale the "much smaller than" relations cannot be checked; a
//! hierarchy only records the values and enforces that they are positive and
//! strictly decreasing in declaration order (largest first).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamHierarchy {
    params: Vec<(String, f64)>,
}

impl ParamHierarchy {
    /// `params` listed largest first, e.g. `[("gamma", 0.1), ("beta", 0.01)]`.
    pub fn new<S: Into<String>>(params: impl IntoIterator<Item = (S, f64)>) -> Result<Self> {
        let params: Vec<(String, f64)> = params.into_iter().map(|(k, v)| (k.into(), v)).collect();
        for (name, v) in &params {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::domain(format!("parameter {name} = {v} must be positive")));
            }
        }
        for w in params.windows(2) {
            if w[0].1 <= w[1].1 {
                return Err(Error::domain(format!(
                    "hierarchy requires {} = {} > {} = {}",
                    w[0].0, w[0].1, w[1].0, w[1].1
                )));
            }
        }
        let mut names: Vec<&str> = params.iter().map(|(k, _)| k.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("duplicate parameter name"));
        }
        Ok(ParamHierarchy { params })
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.iter().map(|(k, _)| k.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_validated() {
        let h = ParamHierarchy::new([("gamma", 0.1), ("beta", 0.01), ("alpha", 0.001)]).unwrap();
        assert_eq!(h.get("beta"), Some(0.01));
        assert_eq!(h.names().collect::<Vec<_>>(), ["gamma", "beta", "alpha"]);
        assert!(ParamHierarchy::new([("alpha", 0.01), ("beta", 0.1)]).is_err());
        assert!(ParamHierarchy::new([("alpha", 0.1), ("beta", 0.1)]).is_err());
        assert!(ParamHierarchy::new([("alpha", -1.0)]).is_err());
        assert!(ParamHierarchy::new([("a", 0.1), ("a", 0.2)]).is_err());
    }
}
