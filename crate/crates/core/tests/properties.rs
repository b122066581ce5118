use nalgebra::DMatrix;
use proptest::prelude::*;

use diffuse::diffusion::{
    db_embed, diffusion_distances, gaussian_affinity, markov_normalize, pairwise_sq_dist, sum_affinity, DataMatrix,
    DbVariant, DistanceMethod, KernelParams, SpectralModel, Truncation,
};
use diffuse::hyperspectral::{build_histogram, normalize_layers, quantize, HyperCube, ReduceParams};
use diffuse::io;
use diffuse::video::{dfs_combine, normalize_range, BinaryMask, BlockPartition};

fn points(max_n: usize, max_dim: usize) -> impl Strategy<Value = DataMatrix> {
    (3..=max_n, 1..=max_dim).prop_flat_map(|(n, d)| {
        prop::collection::vec(0.0f64..1.0, n * d).prop_map(move |v| DataMatrix::from_row_slice(n, d, &v).unwrap())
    })
}

fn mask(rows: usize, cols: usize) -> impl Strategy<Value = BinaryMask> {
    prop::collection::vec(any::<bool>(), rows * cols)
        .prop_map(move |v| BinaryMask::from_values(rows, cols, v.into_iter().map(u8::from).collect()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn markov_rows_sum_to_one(data in points(20, 3), scale in 0.05f64..2.0) {
        let w = gaussian_affinity(&pairwise_sq_dist(&data), KernelParams::new(scale).unwrap());
        let (p, d) = markov_normalize(&w).unwrap();
        for i in 0..p.nrows() {
            prop_assert!((p.row(i).sum() - 1.0).abs() < 1e-12);
            prop_assert!(d[i] >= 1.0);
        }
    }

    #[test]
    fn eigenvalues_lie_in_unit_interval(data in points(20, 3), scale in 0.05f64..2.0) {
        let w = gaussian_affinity(&pairwise_sq_dist(&data), KernelParams::new(scale).unwrap());
        if let Ok(m) = SpectralModel::from_affinity(w) {
            prop_assert!((m.eigenvalues[0] - 1.0).abs() < 1e-10);
            prop_assert!(m.eigenvalues.iter().all(|l| l.abs() <= 1.0 + 1e-10));
            let nu1 = m.nu.column(0);
            prop_assert!(nu1.iter().all(|v| (v - 1.0).abs() < 1e-8));
        }
    }

    #[test]
    fn diffusion_distance_is_a_metric(data in points(12, 3), t in 1u32..4) {
        let w = gaussian_affinity(&pairwise_sq_dist(&data), KernelParams::new(0.5).unwrap());
        let m = SpectralModel::from_affinity(w).unwrap();
        let d = diffusion_distances(&m, t, DistanceMethod::Definitional).map(|v| v.max(0.0).sqrt());
        let n = d.nrows();
        for i in 0..n {
            prop_assert!(d[(i, i)].abs() < 1e-12);
            for j in 0..n {
                prop_assert!((d[(i, j)] - d[(j, i)]).abs() < 1e-12);
                for k in 0..n {
                    prop_assert!(d[(i, j)] <= d[(i, k)] + d[(k, j)] + 1e-9);
                }
            }
        }
    }

    #[test]
    fn affinity_sum_is_monotone(data in points(15, 3), a in 1e-4f64..10.0, f in 1.0f64..100.0) {
        let sq = pairwise_sq_dist(&data);
        let n = data.n_points() as f64;
        let (lo, hi) = (sum_affinity(&sq, a), sum_affinity(&sq, a * f));
        prop_assert!(lo <= hi * (1.0 + 1e-12));
        prop_assert!(lo >= n * (1.0 - 1e-12) && hi <= n * n * (1.0 + 1e-12));
    }

    #[test]
    fn modified_basis_is_orthonormal(data in points(15, 5), scale in 0.2f64..5.0) {
        let trunc = Truncation { eta: Some(data.n_coords()), ..Default::default() };
        if let Ok(e) = db_embed(&data, KernelParams::new(scale).unwrap(), trunc, DbVariant::Modified) {
            // an orthonormal basis of R^n preserves pairwise distances
            let a = pairwise_sq_dist(&data);
            let b = pairwise_sq_dist(&DataMatrix::new(e.coords).unwrap());
            prop_assert!((a - b).amax() < 1e-9);
        }
    }

    #[test]
    fn range_normalization_hits_both_ends(v in prop::collection::vec(-1e3f64..1e3, 2..50), lo in -10.0f64..0.0, span in 0.1f64..300.0) {
        let hi = lo + span;
        let out = normalize_range(&v, lo, hi);
        let (min, max) = out.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, x| (a.0.min(*x), a.1.max(*x)));
        prop_assert!(min >= lo - 1e-9 && max <= hi + 1e-9);
        prop_assert!((max - hi).abs() < 1e-9);
        if v.iter().any(|x| *x != v[0]) {
            prop_assert!((min - lo).abs() < 1e-9);
        }
    }

    #[test]
    fn combination_keeps_whole_components(gray in mask(12, 12), rgb in mask(12, 12)) {
        let out = dfs_combine(&gray, &rgb);
        for r in 0..12 {
            for c in 0..12 {
                if out.get(r, c) {
                    prop_assert!(rgb.get(r, c));
                }
                if gray.get(r, c) && rgb.get(r, c) {
                    prop_assert!(out.get(r, c));
                }
                // components are closed under 8-adjacency within rgb
                if out.get(r, c) {
                    for rr in r.saturating_sub(1)..=(r + 1).min(11) {
                        for cc in c.saturating_sub(1)..=(c + 1).min(11) {
                            prop_assert!(!rgb.get(rr, cc) || out.get(rr, cc));
                        }
                    }
                }
            }
        }
        prop_assert_eq!(dfs_combine(&out, &rgb), out);
    }

    #[test]
    fn blocks_cover_the_frame(rows in 20usize..120, cols in 20usize..120, gr in 1usize..4, gc in 1usize..4, overlap in 0usize..10) {
        let part = BlockPartition { grid_rows: gr, grid_cols: gc, overlap };
        if let Ok(blocks) = part.blocks(rows, cols) {
            prop_assert_eq!(blocks.len(), gr * gc);
            let mut seen = vec![0u8; rows * cols];
            for b in &blocks {
                prop_assert!(b.row + b.rows <= rows && b.col + b.cols <= cols);
                for r in b.row..b.row + b.rows {
                    for c in b.col..b.col + b.cols {
                        seen[r * cols + c] = 1;
                    }
                }
            }
            prop_assert!(seen.iter().all(|s| *s == 1));
        }
    }

    #[test]
    fn quantized_colours_stay_in_range(vals in prop::collection::vec(0.0f32..1.0, 4 * 4 * 3), levels in 2usize..64) {
        let cube = HyperCube::new(4, 4, 3, vals).unwrap();
        let params = ReduceParams { eta: Some(2), epsilon: diffuse::diffusion::EpsilonChoice::Fixed(1.0), ..Default::default() };
        if let Ok(r) = diffuse::hyperspectral::reduce_cube(&cube, &params) {
            let g = normalize_layers(&r);
            prop_assert!(g.values.iter().all(|v| (0.0..=1.0).contains(v)));
            let q = quantize(&g, levels).unwrap();
            prop_assert!(q.values.iter().all(|v| (1..=levels as u16).contains(v)));
            prop_assert_eq!(build_histogram(&q).total(), 16);
        }
    }

    #[test]
    fn cube_file_round_trip(rows in 1usize..6, cols in 1usize..6, bands in 1usize..5, seed in any::<u64>()) {
        let mut rng = diffuse::datagen::SeededRng::new(seed);
        let vals: Vec<f32> = (0..rows * cols * bands).map(|_| rng.normal() as f32).collect();
        let cube = HyperCube::new(rows, cols, bands, vals).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("c.json");
        let data = io::default_data_path(&header);
        io::save_cube(&cube, &header, &data).unwrap();
        prop_assert_eq!(io::load_cube(&header, &data).unwrap(), cube);
    }

    #[test]
    fn matrix_csv_round_trip(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = diffuse::datagen::SeededRng::new(seed);
        let m = DMatrix::from_fn(rows, cols, |_, _| rng.normal() * 1e3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.csv");
        io::write_matrix_csv(&m, &path).unwrap();
        prop_assert_eq!(io::read_matrix_csv(&path).unwrap(), m);
    }

    #[test]
    fn mask_file_round_trip(m in mask(7, 9)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.pgm");
        io::write_mask(&m, &path).unwrap();
        prop_assert_eq!(io::read_mask(&path).unwrap(), m);
    }
}
