use serde::Serialize;

use super::eigen::PlasmonSpectrum;
use super::SpectralError;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct TwinPair {
    pub positive: f64,
    pub negative: f64,
    /// `| |lambda+| - |lambda-| | / lambda+`.
    pub mismatch: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TwinPairs {
    pub pairs: Vec<TwinPair>,
    pub unmatched: Vec<f64>,
}

impl TwinPairs {
    pub fn max_mismatch(&self) -> f64 {
        self.pairs.iter().map(|p| p.mismatch).fold(0.0, f64::max)
    }

    /// Mismatch of the pair containing `lambda`, if it was matched.
    pub fn mismatch_of(&self, lambda: f64) -> Option<f64> {
        self.pairs
            .iter()
            .find(|p| p.positive == lambda || p.negative == lambda)
            .map(|p| p.mismatch)
    }
}

/// Matches positive and negative eigenvalues of a 2D spectrum by absolute
/// value, smallest first.
pub fn pair_twins(spectrum: &PlasmonSpectrum) -> Result<TwinPairs, SpectralError> {
    if !spectrum.kind().is_2d() {
        return Err(SpectralError::Not2D);
    }
    let mut pos: Vec<f64> = spectrum.lambdas().into_iter().filter(|l| *l > 0.0).collect();
    let mut neg: Vec<f64> = spectrum.lambdas().into_iter().filter(|l| *l < 0.0).collect();
    pos.sort_by(f64::total_cmp);
    neg.sort_by(|a, b| b.total_cmp(a));

    let mut out = TwinPairs::default();
    let mut used = vec![false; neg.len()];
    for p in pos {
        let best = neg
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .min_by(|a, b| (a.1.abs() - p).abs().total_cmp(&(b.1.abs() - p).abs()));
        match best {
            Some((j, &n)) => {
                used[j] = true;
                out.pairs.push(TwinPair {
                    positive: p,
                    negative: n,
                    mismatch: (p - n.abs()).abs() / p,
                });
            }
            None => out.unmatched.push(p),
        }
    }
    out.unmatched
        .extend(neg.iter().zip(&used).filter(|(_, u)| !**u).map(|(n, _)| *n));
    Ok(out)
}
