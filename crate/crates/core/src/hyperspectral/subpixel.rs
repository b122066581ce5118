use crate::error::{Error, Result};

use super::reduce::ReducedCube;

/// Isolation test settings: a pixel is isolated in a layer when more than
/// `tau2` neighbours within radius `alpha` differ from it by more than `tau1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubPixelParams {
    pub alpha: usize,
    pub tau1: f64,
    pub tau2: usize,
}

impl Default for SubPixelParams {
    fn default() -> Self {
        Self { alpha: 1, tau1: 0.04, tau2: 3 }
    }
}

impl SubPixelParams {
    pub fn validate(&self) -> Result<()> {
        if self.alpha < 1 || !(self.tau1 > 0.0) || self.tau2 < 1 {
            return Err(Error::invalid("sub-pixel parameters need alpha >= 1, tau1 > 0, tau2 >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubPixelHit {
    pub row: usize,
    pub col: usize,
    /// Number of layers in which the pixel is isolated.
    pub layers_isolated: usize,
}

/// Pixels isolated in at least two layers of a normalized reduced cube,
/// in row-major order. Neighbourhoods are clipped at the borders.
pub fn detect_subpixel(ghat: &ReducedCube, params: &SubPixelParams) -> Result<Vec<SubPixelHit>> {
    params.validate()?;
    let (rows, cols, a) = (ghat.rows, ghat.cols, params.alpha);
    let mut hits = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let p = r * cols + c;
            if !ghat.in_support(p) {
                continue;
            }
            let mut layers = 0;
            for k in 0..ghat.colors {
                let v = ghat.value(r, c, k);
                let mut delta = 0;
                for rr in r.saturating_sub(a)..=(r + a).min(rows - 1) {
                    for cc in c.saturating_sub(a)..=(c + a).min(cols - 1) {
                        let q = rr * cols + cc;
                        if q != p && ghat.in_support(q) && (v - ghat.value(rr, cc, k)).abs() > params.tau1 {
                            delta += 1;
                        }
                    }
                }
                if delta > params.tau2 {
                    layers += 1;
                }
            }
            if layers >= 2 {
                hits.push(SubPixelHit { row: r, col: c, layers_isolated: layers });
            }
        }
    }
    Ok(hits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{EmbeddingKind, EpsilonSource};

    fn cube_with_spike(layers: &[usize]) -> ReducedCube {
        let (rows, cols, colors) = (5, 5, 3);
        let mut values = vec![0.2; rows * cols * colors];
        for &k in layers {
            values[(2 * cols + 2) * colors + k] += 0.4;
        }
        ReducedCube {
            rows,
            cols,
            colors,
            values,
            support: None,
            kind: EmbeddingKind::Db,
            epsilon: 1.0,
            epsilon_source: EpsilonSource::Fixed,
            eta_saturated: false,
        }
    }

    #[test]
    fn spike_in_two_layers_is_found() {
        let hits = detect_subpixel(&cube_with_spike(&[0, 2]), &SubPixelParams::default()).unwrap();
        assert_eq!(hits, vec![SubPixelHit { row: 2, col: 2, layers_isolated: 2 }]);
    }

    #[test]
    fn spike_in_one_layer_is_ignored() {
        assert!(detect_subpixel(&cube_with_spike(&[1]), &SubPixelParams::default()).unwrap().is_empty());
    }

    #[test]
    fn invalid_params() {
        let p = SubPixelParams { alpha: 0, ..Default::default() };
        assert!(detect_subpixel(&cube_with_spike(&[]), &p).is_err());
    }
}
