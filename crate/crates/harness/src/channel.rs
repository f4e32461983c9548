//! Channel description files.
//!
//! ```json
//! {"t": 2, "r": 2, "H1": [[1, 0], [0, 1]], "H2": [[1, 0], [0, 1]], "P": 2.0,
//!  "K1": [[1, 0], [0, 1]], "K2": [[1, 0], [0, 1]]}
//! ```
//!
//! `H1`, `H2` are `r x t` and given row by row. `K1`, `K2` are optional; when
//! absent the water-filled sum-capacity covariances are used.

use std::path::Path;

use cfma_core::waterfill::WaterfillOptions;
use cfma_core::{iterative_waterfill, ChannelPair, CovariancePair, Matrix};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Deserialized channel file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    /// Transmit antennas per user.
    pub t: usize,
    /// Receive antennas.
    pub r: usize,
    /// Channel of user 1, `r` rows of `t` entries.
    #[serde(rename = "H1")]
    pub h1: Vec<Vec<f64>>,
    /// Channel of user 2.
    #[serde(rename = "H2")]
    pub h2: Vec<Vec<f64>>,
    /// Per-user power budget.
    #[serde(rename = "P")]
    pub power: f64,
    /// Input covariance of user 1.
    #[serde(rename = "K1", default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<Vec<Vec<f64>>>,
    /// Input covariance of user 2.
    #[serde(rename = "K2", default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<Vec<Vec<f64>>>,
}

fn matrix(rows: &[Vec<f64>], r: usize, c: usize, name: &str) -> Result<Matrix> {
    if rows.len() != r || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Input(format!("{name} must be {r}x{c}")));
    }
    Ok(Matrix::from_rows(rows)?)
}

impl ChannelSpec {
    /// Reads and parses a channel file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Builds a spec from a channel pair and power.
    pub fn from_channel(ch: &ChannelPair, power: f64) -> Self {
        ChannelSpec {
            t: ch.t(),
            r: ch.r(),
            h1: ch.h1().to_rows(),
            h2: ch.h2().to_rows(),
            power,
            k1: None,
            k2: None,
        }
    }

    /// The validated channel pair.
    pub fn channel(&self) -> Result<ChannelPair> {
        if self.t == 0 || self.r == 0 {
            return Err(Error::Input("t and r must be positive".into()));
        }
        let h1 = matrix(&self.h1, self.r, self.t, "H1")?;
        let h2 = matrix(&self.h2, self.r, self.t, "H2")?;
        Ok(ChannelPair::new(h1, h2)?)
    }

    /// Explicit covariances at `power`, if the file provides both.
    pub fn explicit_covariances(&self, power: f64) -> Result<Option<CovariancePair>> {
        match (&self.k1, &self.k2) {
            (Some(k1), Some(k2)) => {
                let k1 = matrix(k1, self.t, self.t, "K1")?;
                let k2 = matrix(k2, self.t, self.t, "K2")?;
                Ok(Some(CovariancePair::new(k1, k2, power)?))
            }
            (None, None) => Ok(None),
            _ => Err(Error::Input("K1 and K2 must be given together".into())),
        }
    }

    /// Explicit covariances if present, otherwise the water-filled ones.
    pub fn covariances(&self, power: f64) -> Result<CovariancePair> {
        match self.explicit_covariances(power)? {
            Some(cov) => Ok(cov),
            None => {
                let ch = self.channel()?;
                Ok(iterative_waterfill(&ch, power, &WaterfillOptions::default())?.covariances)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_file() {
        let spec: ChannelSpec =
            serde_json::from_str(r#"{"t":1,"r":2,"H1":[[1],[0]],"H2":[[0.5],[1]],"P":2}"#).unwrap();
        let ch = spec.channel().unwrap();
        assert_eq!((ch.t(), ch.r()), (1, 2));
        let cov = spec.covariances(2.0).unwrap();
        assert_eq!(cov.k1()[(0, 0)], 2.0);
    }

    #[test]
    fn rejects_bad_shapes_and_fields() {
        let spec: ChannelSpec =
            serde_json::from_str(r#"{"t":2,"r":2,"H1":[[1,0]],"H2":[[1,0],[0,1]],"P":1}"#).unwrap();
        assert!(matches!(spec.channel(), Err(Error::Input(_))));
        assert!(serde_json::from_str::<ChannelSpec>(r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":1,"x":0}"#).is_err());
        let spec: ChannelSpec =
            serde_json::from_str(r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":1,"K1":[[1]]}"#).unwrap();
        assert!(spec.covariances(1.0).is_err());
    }

    #[test]
    fn explicit_covariances_are_checked() {
        let spec: ChannelSpec = serde_json::from_str(
            r#"{"t":1,"r":1,"H1":[[1]],"H2":[[1]],"P":1,"K1":[[2]],"K2":[[1]]}"#,
        )
        .unwrap();
        let err = spec.covariances(1.0).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
