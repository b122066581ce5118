use crate::diffusion::{
    coordinate_vectors, db_embed_model, gaussian_affinity, pairwise_sq_dist, resolve_epsilon, DbVariant,
    EmbeddingKind, EpsilonChoice, EpsilonSource, KernelParams, SpectralModel, Truncation,
};
use crate::error::{Error, Result};

use super::cube::HyperCube;

/// Settings of the dimensionality-reduction phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReduceParams {
    pub epsilon: EpsilonChoice,
    pub delta: f64,
    /// Fixed colour count; overrides the `delta` search when set.
    pub eta: Option<usize>,
    pub variant: DbVariant,
}

impl Default for ReduceParams {
    fn default() -> Self {
        Self { epsilon: EpsilonChoice::Auto, delta: 1e-3, eta: None, variant: DbVariant::Plain }
    }
}

/// Per-pixel colour vectors produced by the reduction, stored pixel-major.
///
/// `support`, when present, marks the pixels that carry colours; the rest
/// hold zeros and are ignored downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedCube {
    pub rows: usize,
    pub cols: usize,
    pub colors: usize,
    pub values: Vec<f64>,
    pub support: Option<Vec<bool>>,
    pub kind: EmbeddingKind,
    pub epsilon: f64,
    pub epsilon_source: EpsilonSource,
    pub eta_saturated: bool,
}

impl ReducedCube {
    pub fn color(&self, pixel: usize) -> &[f64] {
        &self.values[pixel * self.colors..(pixel + 1) * self.colors]
    }

    pub fn value(&self, row: usize, col: usize, layer: usize) -> f64 {
        self.values[(row * self.cols + col) * self.colors + layer]
    }

    pub fn in_support(&self, pixel: usize) -> bool {
        self.support.as_ref().is_none_or(|s| s[pixel])
    }

    /// Pixel indices carrying colours, ascending.
    pub fn support_pixels(&self) -> Vec<usize> {
        (0..self.rows * self.cols).filter(|&p| self.in_support(p)).collect()
    }

    /// Applies `f(layer, value)` to every supported entry.
    pub fn map_layers(&self, mut f: impl FnMut(usize, f64) -> f64) -> ReducedCube {
        let mut out = self.clone();
        for p in self.support_pixels() {
            for k in 0..self.colors {
                let i = p * self.colors + k;
                out.values[i] = f(k, self.values[i]);
            }
        }
        out
    }

    /// Removes the first colour layer.
    pub fn drop_first(&self) -> Result<ReducedCube> {
        if self.colors < 2 {
            return Err(Error::invalid("cannot drop the only colour layer"));
        }
        let colors = self.colors - 1;
        let values = self.values.chunks(self.colors).flat_map(|c| c[1..].iter().copied()).collect();
        Ok(ReducedCube { colors, values, ..self.clone() })
    }
}

/// Reduces every pixel of the cube to `eta` diffusion-bases colours.
pub fn reduce_cube(cube: &HyperCube, params: &ReduceParams) -> Result<ReducedCube> {
    let all: Vec<usize> = (0..cube.pixels()).collect();
    reduce_pixels(cube, &all, params)
}

/// Reduction restricted to the listed pixels (ascending row-major indices).
pub(crate) fn reduce_pixels(cube: &HyperCube, select: &[usize], params: &ReduceParams) -> Result<ReducedCube> {
    let data = cube.normalized_pixels(select);
    let gamma = coordinate_vectors(&data);
    let sq = pairwise_sq_dist(&gamma);
    let (epsilon, epsilon_source) = resolve_epsilon(&sq, params.epsilon, select.len())?;
    let model = SpectralModel::from_affinity(gaussian_affinity(&sq, KernelParams::new(epsilon)?))?;
    let trunc = Truncation { time: 1, delta: params.delta, eta: params.eta };
    trunc.validate()?;
    let emb = db_embed_model(&data, &model, trunc, params.variant, epsilon);

    let n = cube.pixels();
    let colors = emb.eta;
    let mut values = vec![0.0; n * colors];
    for (i, &p) in select.iter().enumerate() {
        for k in 0..colors {
            values[p * colors + k] = emb.coords[(i, k)];
        }
    }
    let support = if select.len() == n {
        None
    } else {
        let mut s = vec![false; n];
        for &p in select {
            s[p] = true;
        }
        Some(s)
    };
    Ok(ReducedCube {
        rows: cube.rows(),
        cols: cube.cols(),
        colors,
        values,
        support,
        kind: emb.kind,
        epsilon,
        epsilon_source,
        eta_saturated: emb.eta_saturated,
    })
}

/// Min-max scales each colour layer to `[0, 1]` over the supported pixels;
/// constant layers become zeros.
pub fn normalize_layers(g: &ReducedCube) -> ReducedCube {
    let mut lo = vec![f64::INFINITY; g.colors];
    let mut hi = vec![f64::NEG_INFINITY; g.colors];
    for p in g.support_pixels() {
        for (k, &v) in g.color(p).iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    g.map_layers(|k, v| {
        let span = hi[k] - lo[k];
        if span > 0.0 {
            (v - lo[k]) / span
        } else {
            0.0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer_cube(values: Vec<f64>) -> ReducedCube {
        ReducedCube {
            rows: 1,
            cols: values.len(),
            colors: 1,
            values,
            support: None,
            kind: EmbeddingKind::Db,
            epsilon: 1.0,
            epsilon_source: EpsilonSource::Fixed,
            eta_saturated: false,
        }
    }

    #[test]
    fn normalizes_two_values() {
        assert_eq!(normalize_layers(&layer_cube(vec![2.0, 4.0])).values, vec![0.0, 1.0]);
    }

    #[test]
    fn constant_layer_is_zero() {
        assert_eq!(normalize_layers(&layer_cube(vec![3.0, 3.0, 3.0])).values, vec![0.0; 3]);
    }

    #[test]
    fn identical_bands_give_one_colour() {
        let cube = HyperCube::from_fn(3, 3, 4, |r, c, _| (r * 3 + c) as f32 * 0.25 + 0.5).unwrap();
        let g = reduce_cube(&cube, &ReduceParams { epsilon: EpsilonChoice::Fixed(1.0), ..ReduceParams::default() }).unwrap();
        assert_eq!(g.colors, 1);
        // Colour 1 is a positive multiple of the normalized image.
        let img: Vec<f64> = (0..9).map(|p| p as f64 / 8.0).collect();
        let scale = g.values[8] / img[8];
        assert!(scale > 0.0);
        for p in 0..9 {
            assert!((g.values[p] - scale * img[p]).abs() < 1e-8);
        }
    }

    #[test]
    fn two_by_two_projection_by_hand() {
        // Bands (normalized over pixels): b0 = [0, 1, 0, 1], b1 = [0, 0, 1, 1].
        // |b0 - b1|^2 = 2, so with eps = 1 the band affinity is
        // [[1, e^-1], [e^-1, 1]]: equal degrees, nu_1 = (1, 1), theta_2 = (1, -1)/sqrt(2).
        let cube = HyperCube::new(2, 2, 2, vec![0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0]).unwrap();
        let p = ReduceParams { epsilon: EpsilonChoice::Fixed(1.0), eta: Some(2), variant: DbVariant::Modified, ..Default::default() };
        let g = reduce_cube(&cube, &p).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let want = [[0.0, 0.0], [s, s], [s, -s], [2.0 * s, 0.0]];
        for (px, w) in want.iter().enumerate() {
            let got = g.color(px);
            // Second eigenvector sign: largest entry positive, ties to index 0.
            assert!((got[0] - w[0]).abs() < 1e-12 && (got[1] - w[1]).abs() < 1e-12, "{px}: {got:?}");
        }
    }
}
