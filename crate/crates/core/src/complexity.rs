//! Per-iteration arithmetic cost of each algorithm, per node.
//!
//! Counts are closed-form polynomials in `M`, `D` and the neighbourhood size
//! `|N_k|`; the simulator does not instrument itself.
//!
//! ```
//! use drjio_core::complexity::{op_counts, CostModel};
//!
//! let r = op_counts(CostModel::DrjioNlms, 20, 5, 5).unwrap();
//! assert_eq!(r.mults, 285);
//! ```

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CostModel {
    DrjioNlms,
    DrjioRls,
    DNlms,
    DRls,
    KrylovNlms,
    PrincipalSubspace,
}

impl CostModel {
    pub const ALL: [CostModel; 6] = [
        CostModel::DrjioNlms,
        CostModel::DrjioRls,
        CostModel::DNlms,
        CostModel::DRls,
        CostModel::KrylovNlms,
        CostModel::PrincipalSubspace,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CostModel::DrjioNlms => "DRJIO-NLMS",
            CostModel::DrjioRls => "DRJIO-RLS",
            CostModel::DNlms => "dNLMS",
            CostModel::DRls => "dRLS",
            CostModel::KrylovNlms => "Krylov-NLMS",
            CostModel::PrincipalSubspace => "principal-subspace",
        }
    }
}

impl fmt::Display for CostModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CostModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CostModel::ALL
            .into_iter()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ComplexityReport {
    pub algorithm: CostModel,
    pub m: u64,
    pub d: u64,
    pub nk: u64,
    pub mults: u64,
    pub adds: u64,
}

pub fn op_counts(algorithm: CostModel, m: u64, d: u64, nk: u64) -> Result<ComplexityReport> {
    if m < 1 || d < 1 || d > m || nk < 1 {
        return Err(Error::InvalidParameter(format!(
            "need M >= 1, 1 <= D <= M and |N_k| >= 1, got M = {m}, D = {d}, |N_k| = {nk}"
        )));
    }
    let (mults, adds) = match algorithm {
        CostModel::DrjioNlms => (
            2 * (d + 1) * m + (3 + nk) * d + 5,
            (2 * d + 1) * m + (2 + nk) * d - 2,
        ),
        CostModel::DrjioRls => (
            2 * m * m + (3 + 2 * d) * m + 4 * d * d + (9 + nk) * d,
            2 * m * m + 2 * d * m + 4 * d * d + (2 + nk) * d,
        ),
        CostModel::DNlms => ((4 + nk) * m + 1, (5 + nk) * m - 1),
        CostModel::DRls => (
            4 * m * m + (12 + nk) * m - 1,
            4 * m * m + (16 + nk) * m + 1,
        ),
        CostModel::KrylovNlms => (
            6 * d * m * m + 4 * m + (5 + nk) * d,
            6 * d * m * m + 2 * m + (2 + nk) * d,
        ),
        CostModel::PrincipalSubspace => (
            m * m * m + 2 * (d + 2) * m + (3 + nk) * d + 4,
            m * m * m + (d + 1) * m + (2 + nk) * d - 1,
        ),
    };
    Ok(ComplexityReport {
        algorithm,
        m,
        d,
        nk,
        mults,
        adds,
    })
}

/// One report per algorithm per `M` in `m_range`, algorithms in [`CostModel::ALL`] order.
pub fn complexity_sweep(
    m_range: impl IntoIterator<Item = u64>,
    d: u64,
    nk: u64,
) -> Result<Vec<ComplexityReport>> {
    let mut rows = Vec::new();
    for m in m_range {
        for alg in CostModel::ALL {
            rows.push(op_counts(alg, m, d, nk)?);
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "algorithm,M,D,Nk,mults,adds";

pub fn to_csv(rows: &[ComplexityReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.algorithm, r.m, r.d, r.nk, r.mults, r.adds
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_examples() {
        assert_eq!(op_counts(CostModel::DrjioNlms, 20, 5, 5).unwrap().mults, 285);
        assert_eq!(op_counts(CostModel::DNlms, 20, 5, 5).unwrap().mults, 181);
        assert_eq!(op_counts(CostModel::DrjioRls, 20, 5, 5).unwrap().mults, 1230);
    }

    #[test]
    fn rejects_invalid_sizes() {
        assert!(op_counts(CostModel::DNlms, 0, 1, 1).is_err());
        assert!(op_counts(CostModel::DNlms, 4, 5, 1).is_err());
        assert!(op_counts(CostModel::DNlms, 4, 2, 0).is_err());
    }

    #[test]
    fn labels_round_trip() {
        for c in CostModel::ALL {
            assert_eq!(c.label().parse::<CostModel>().unwrap(), c);
        }
        assert!("LMS".parse::<CostModel>().is_err());
    }

    #[test]
    fn sweep_single_point_matches() {
        let rows = complexity_sweep([30], 5, 5).unwrap();
        assert_eq!(rows.len(), 6);
        for r in rows {
            assert_eq!(r, op_counts(r.algorithm, 30, 5, 5).unwrap());
        }
    }

    #[test]
    fn csv_layout() {
        let csv = to_csv(&complexity_sweep([20], 5, 5).unwrap());
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.next(), Some("DRJIO-NLMS,20,5,5,285,253"));
    }
}
