//! ROC curves and FRR at a fixed FAR. A sample is accepted when its score is
//! at least the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// `f64::INFINITY` for the reject-everything sentinel.
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

/// Points ordered by ascending threshold: FAR falls and FRR rises along it.
#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

fn sorted(scores: &[f64], what: &str) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::validation(format!("no {what} scores")));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::validation(format!("non-finite {what} score")));
    }
    let mut v = scores.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// Thresholds at every distinct observed score plus `+inf`.
pub fn roc(genuine: &[f64], impostor: &[f64]) -> Result<RocCurve> {
    let g = sorted(genuine, "genuine")?;
    let i = sorted(impostor, "impostor")?;
    let mut thresholds: Vec<f64> = g.iter().chain(&i).copied().collect();
    thresholds.sort_by(f64::total_cmp);
    thresholds.dedup();
    thresholds.push(f64::INFINITY);

    let (ng, ni) = (g.len() as f64, i.len() as f64);
    // Running counts of scores strictly below the threshold.
    let (mut gb, mut ib) = (0usize, 0usize);
    let points = thresholds
        .into_iter()
        .map(|t| {
            while gb < g.len() && g[gb] < t {
                gb += 1;
            }
            while ib < i.len() && i[ib] < t {
                ib += 1;
            }
            RocPoint {
                threshold: t,
                far: (i.len() - ib) as f64 / ni,
                frr: gb as f64 / ng,
            }
        })
        .collect();
    Ok(RocCurve { points })
}

impl RocCurve {
    /// The operating point with the lowest threshold whose FAR does not
    /// exceed `target`, i.e. the largest achievable FAR at or under the
    /// target. No interpolation.
    pub fn operating_point(&self, target_far: f64) -> Result<RocPoint> {
        if !(target_far > 0.0 && target_far <= 1.0) {
            return Err(Error::validation(format!(
                "target FAR must lie in (0, 1], got {target_far}"
            )));
        }
        self.points
            .iter()
            .find(|p| p.far <= target_far)
            .copied()
            .ok_or_else(|| Error::validation("no threshold reaches the target FAR"))
    }

    pub fn is_monotone(&self) -> bool {
        self.points
            .windows(2)
            .all(|w| w[0].threshold < w[1].threshold && w[1].far <= w[0].far && w[1].frr >= w[0].frr)
    }

    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<roc_points.csv>", e);
        writeln!(out, "threshold,far,frr").map_err(io)?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.threshold, p.far, p.frr).map_err(io)?;
        }
        Ok(())
    }
}

pub fn frr_at_far(curve: &RocCurve, target_far: f64) -> Result<f64> {
    Ok(curve.operating_point(target_far)?.frr)
}
