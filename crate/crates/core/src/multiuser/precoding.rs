//! Beam training, zero-forcing digital precoding, and the sum rate.

use num_complex::Complex64;

use crate::channel::ComplexVector;
use crate::error::{Error, Result};

use super::codebook::Codebook;

/// Relative pivot threshold below which the effective channel counts as
/// rank deficient.
const RANK_EPS: f64 = 1e-12;
/// Diagonal loading applied in the rank-deficient fallback, as a fraction
/// of the Gram trace.
const LOADING_FRACTION: f64 = 1e-10;

/// Beam sweeping: each user reports the index of the codeword with the
/// highest received power `|h^H c|^2`, ties broken toward the lowest
/// index. Winning indices are exclusive: a user whose best codeword is
/// already taken by an earlier user gets its best not-yet-taken one.
pub fn beam_training(book: &Codebook, channels: &[ComplexVector]) -> Result<Vec<usize>> {
    if channels.is_empty() {
        return Err(Error::Domain("beam training needs at least one user".into()));
    }
    if channels.len() > book.len() {
        return Err(Error::Domain(format!(
            "{} users but only {} codewords",
            channels.len(),
            book.len()
        )));
    }
    let mut taken = vec![false; book.len()];
    let mut winners = Vec::with_capacity(channels.len());
    for h in channels {
        let mut best = None;
        let mut best_score = f64::NEG_INFINITY;
        for (idx, cw) in book.codewords.iter().enumerate() {
            if taken[idx] {
                continue;
            }
            let score = h.inner(cw).norm_sqr();
            if score > best_score {
                best_score = score;
                best = Some(idx);
            }
        }
        let idx = best.expect("more codewords than users");
        taken[idx] = true;
        winners.push(idx);
    }
    Ok(winners)
}

/// Zero-forcing digital precoder for an effective channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfPrecoder {
    /// One unit-norm column of length `n_rf` per user.
    pub columns: Vec<Vec<Complex64>>,
    /// Set when the Gram matrix needed diagonal loading to invert; the
    /// zero-forcing property is only approximate then.
    pub degraded_rank: bool,
}

/// Computes `F = H^H (H H^H)^-1` for the effective channel `H` whose row
/// `m` is `h_m^H W` (length `n_rf`), then normalizes each column.
///
/// Requires `m <= n_rf`. A rank-deficient `H H^H` falls back to diagonal
/// loading `1e-10 * trace` and sets [`ZfPrecoder::degraded_rank`].
pub fn zf_precode(effective: &[Vec<Complex64>]) -> Result<ZfPrecoder> {
    let m = effective.len();
    if m == 0 {
        return Err(Error::Domain("zero-forcing needs at least one user".into()));
    }
    let k = effective[0].len();
    for row in effective {
        if row.len() != k {
            return Err(Error::Dimension {
                expected: k,
                got: row.len(),
            });
        }
    }
    if m > k {
        return Err(Error::Domain(format!(
            "zero-forcing needs users <= RF chains, got {m} users over {k} chains"
        )));
    }

    // gram = H H^H, Hermitian positive semidefinite
    let mut gram = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for i in 0..m {
        for j in 0..m {
            gram[i][j] = effective[i]
                .iter()
                .zip(&effective[j])
                .map(|(a, b)| a * b.conj())
                .sum();
        }
    }

    let mut degraded = false;
    let solved = match solve(gram.clone(), effective) {
        Some(x) => x,
        None => {
            degraded = true;
            let trace: f64 = (0..m).map(|i| gram[i][i].re).sum();
            let loading = LOADING_FRACTION * trace.max(f64::MIN_POSITIVE);
            for (i, row) in gram.iter_mut().enumerate() {
                row[i] += loading;
            }
            solve(gram, effective).expect("loaded Gram matrix is positive definite")
        }
    };

    // F = (gram^-1 H)^H: column m is the conjugate of solved row m
    let mut columns = Vec::with_capacity(m);
    for row in &solved {
        let mut col: Vec<Complex64> = row.iter().map(|e| e.conj()).collect();
        let norm: f64 = col.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for e in &mut col {
                *e /= norm;
            }
        } else {
            degraded = true;
            col[0] = Complex64::new(1.0, 0.0);
        }
        columns.push(col);
    }
    Ok(ZfPrecoder {
        columns,
        degraded_rank: degraded,
    })
}

/// Gaussian elimination with partial pivoting on `a x = b`, where `b`
/// rows are the right-hand sides. Returns `None` when a pivot falls under
/// `RANK_EPS` relative to the matrix scale.
fn solve(mut a: Vec<Vec<Complex64>>, b: &[Vec<Complex64>]) -> Option<Vec<Vec<Complex64>>> {
    let m = a.len();
    let mut x: Vec<Vec<Complex64>> = b.to_vec();
    let scale = a
        .iter()
        .flat_map(|row| row.iter().map(|e| e.norm()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..m {
        let (pivot_row, pivot_mag) = (col..m)
            .map(|r| (r, a[r][col].norm()))
            .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite pivots"))
            .expect("non-empty column");
        if pivot_mag < RANK_EPS * scale {
            return None;
        }
        a.swap(col, pivot_row);
        x.swap(col, pivot_row);
        let pivot = a[col][col];
        let a_pivot = a[col].clone();
        let x_pivot = x[col].clone();
        for r in 0..m {
            if r == col {
                continue;
            }
            let factor = a[r][col] / pivot;
            for (dst, src) in a[r][col..].iter_mut().zip(&a_pivot[col..]) {
                *dst -= factor * src;
            }
            for (dst, src) in x[r].iter_mut().zip(&x_pivot) {
                *dst -= factor * src;
            }
        }
    }
    for (r, row) in x.iter_mut().enumerate() {
        let pivot = a[r][r];
        for e in row.iter_mut() {
            *e /= pivot;
        }
    }
    Some(x)
}

/// Analog + digital precoders with per-user powers and noise variances.
///
/// Analog columns are codewords (unit norm); digital columns are scaled
/// so every hybrid beam `W f_m` has unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecodingSolution {
    pub analog: Vec<ComplexVector>,
    pub digital: Vec<Vec<Complex64>>,
    pub power_w: Vec<f64>,
    pub noise_w: Vec<f64>,
    pub degraded_rank: bool,
}

/// Combines the analog codewords with a zero-forcing precoder, rescaling
/// each digital column so the hybrid beam has unit norm.
pub fn assemble_solution(
    analog: Vec<ComplexVector>,
    zf: ZfPrecoder,
    power_w: Vec<f64>,
    noise_w: Vec<f64>,
) -> PrecodingSolution {
    let mut digital = zf.columns;
    for col in &mut digital {
        let beam = hybrid_beam(&analog, col);
        let norm = beam.norm();
        if norm > 0.0 {
            for e in col.iter_mut() {
                *e /= norm;
            }
        }
    }
    PrecodingSolution {
        analog,
        digital,
        power_w,
        noise_w,
        degraded_rank: zf.degraded_rank,
    }
}

/// `W f`: linear combination of the analog columns by a digital column.
pub fn hybrid_beam(analog: &[ComplexVector], column: &[Complex64]) -> ComplexVector {
    assert_eq!(analog.len(), column.len(), "one digital weight per RF chain");
    let n = analog[0].len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (w, chain) in column.iter().zip(analog) {
        for (o, e) in out.iter_mut().zip(chain.entries()) {
            *o += w * e;
        }
    }
    ComplexVector::from_entries(out)
}

/// Per-user and total spectral efficiency of one precoded configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRateTally {
    pub per_user_bps_hz: Vec<f64>,
    pub sum_bps_hz: f64,
}

/// `R = sum_m log2(1 + p_m |h_m^H W f_m|^2 /
///                   (sigma_m^2 + sum_{l != m} p_l |h_m^H W f_l|^2))`.
pub fn sum_rate(channels: &[ComplexVector], solution: &PrecodingSolution) -> SumRateTally {
    let m = channels.len();
    assert_eq!(m, solution.digital.len(), "one channel per digital column");
    assert_eq!(m, solution.power_w.len(), "one power per user");
    assert_eq!(m, solution.noise_w.len(), "one noise variance per user");
    let beams: Vec<ComplexVector> = solution
        .digital
        .iter()
        .map(|col| hybrid_beam(&solution.analog, col))
        .collect();
    let mut per_user = Vec::with_capacity(m);
    for (i, h) in channels.iter().enumerate() {
        let mut signal = 0.0;
        let mut interference = 0.0;
        for (l, beam) in beams.iter().enumerate() {
            let coupling = h.inner(beam).norm_sqr();
            if l == i {
                signal = solution.power_w[i] * coupling;
            } else {
                interference += solution.power_w[l] * coupling;
            }
        }
        per_user.push((1.0 + signal / (solution.noise_w[i] + interference)).log2());
    }
    let sum = per_user.iter().sum();
    SumRateTally {
        per_user_bps_hz: per_user,
        sum_bps_hz: sum,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{los_channel, PathSpec};
    use crate::geometry::{SphericalPoint, UraConfig};
    use crate::multiuser::codebook::build_polar_codebook;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    #[test]
    fn training_picks_matched_codeword() {
        let cfg = UraConfig::half_wavelength(16, 16, 28e9).unwrap();
        let book = build_polar_codebook(&cfg, 16, 16, 4).unwrap();
        let meta = book.meta[37];
        let r = meta.range_m.unwrap();
        let theta = meta.u_z.acos();
        let phi = (meta.u_y / (1.0 - meta.u_z * meta.u_z).sqrt()).asin();
        let p = SphericalPoint::new(phi, theta, r).unwrap();
        let h = los_channel(&cfg, &[PathSpec::los(p)]).unwrap();
        let winners = beam_training(&book, &[h]).unwrap();
        assert_eq!(winners, vec![37]);
    }

    #[test]
    fn training_matches_exhaustive_argmax() {
        let cfg = UraConfig::half_wavelength(8, 4, 28e9).unwrap();
        let book = build_polar_codebook(&cfg, 8, 4, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let channels: Vec<ComplexVector> = (0..4)
            .map(|_| ComplexVector::from_entries(random_vec(&mut rng, cfg.n_bs())))
            .collect();
        let winners = beam_training(&book, &channels).unwrap();
        // independent re-scoring with the same exclusivity rule
        let mut taken = vec![false; book.len()];
        for (h, &w) in channels.iter().zip(&winners) {
            let mut best = usize::MAX;
            let mut best_score = f64::NEG_INFINITY;
            for (idx, codeword) in book.codewords.iter().enumerate() {
                if taken[idx] {
                    continue;
                }
                let score = h.inner(codeword).norm_sqr();
                if score > best_score {
                    best_score = score;
                    best = idx;
                }
            }
            assert_eq!(w, best);
            taken[best] = true;
        }
        // exclusivity
        let mut sorted = winners.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), winners.len());
    }

    #[test]
    fn training_rejects_oversubscription() {
        let cfg = UraConfig::half_wavelength(2, 2, 28e9).unwrap();
        let book = build_polar_codebook(&cfg, 1, 1, 1).unwrap();
        let h = ComplexVector::from_entries(vec![Complex64::new(1.0, 0.0); 4]);
        assert!(beam_training(&book, &[h.clone(), h.clone(), h]).is_err());
    }

    #[test]
    fn zf_single_user_is_matched_filter() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let row = random_vec(&mut rng, 4);
        let zf = zf_precode(std::slice::from_ref(&row)).unwrap();
        assert!(!zf.degraded_rank);
        let col = &zf.columns[0];
        let norm: f64 = col.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        // proportional to the conjugated row
        let row_norm: f64 = row.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
        let scale = row[0].conj() / (col[0] * row_norm);
        for (c, r) in col.iter().zip(&row) {
            let back = c * scale * row_norm;
            assert_abs_diff_eq!(back.re, r.conj().re, epsilon = 1e-10);
            assert_abs_diff_eq!(back.im, r.conj().im, epsilon = 1e-10);
        }
    }

    #[test]
    fn zf_nulls_interference() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20 {
            let effective: Vec<Vec<Complex64>> = (0..3).map(|_| random_vec(&mut rng, 4)).collect();
            let zf = zf_precode(&effective).unwrap();
            assert!(!zf.degraded_rank);
            for (m, row) in effective.iter().enumerate() {
                let own: Complex64 = row.iter().zip(&zf.columns[m]).map(|(h, f)| h * f).sum();
                for (l, col) in zf.columns.iter().enumerate() {
                    if l == m {
                        continue;
                    }
                    let cross: Complex64 = row.iter().zip(col).map(|(h, f)| h * f).sum();
                    assert!(
                        cross.norm() <= 1e-9 * own.norm(),
                        "residual interference {} vs signal {}",
                        cross.norm(),
                        own.norm()
                    );
                }
            }
        }
    }

    #[test]
    fn zf_orthogonal_rows_give_scaled_conjugates() {
        let e0 = vec![
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let e1 = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -3.0),
            Complex64::new(0.0, 0.0),
        ];
        let zf = zf_precode(&[e0, e1]).unwrap();
        assert_abs_diff_eq!(zf.columns[0][0].norm(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(zf.columns[1][1].norm(), 1.0, epsilon = 1e-12);
        assert!(zf.columns[0][1].norm() < 1e-12);
        assert!(zf.columns[1][0].norm() < 1e-12);
    }

    #[test]
    fn zf_rank_deficient_falls_back() {
        let row = vec![
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.25, 2.0),
            Complex64::new(0.0, 1.0),
        ];
        let zf = zf_precode(&[row.clone(), row]).unwrap();
        assert!(zf.degraded_rank);
        for col in &zf.columns {
            let norm: f64 = col.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn zf_rejects_too_many_users() {
        let rows: Vec<Vec<Complex64>> = (0..3)
            .map(|i| vec![Complex64::new(i as f64 + 1.0, 0.0); 2])
            .collect();
        assert!(zf_precode(&rows).is_err());
    }

    #[test]
    fn hybrid_beams_unit_norm_after_assembly() {
        let cfg = UraConfig::half_wavelength(8, 8, 28e9).unwrap();
        let book = build_polar_codebook(&cfg, 8, 8, 2).unwrap();
        let analog: Vec<ComplexVector> = book.codewords[10..14].to_vec();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let effective: Vec<Vec<Complex64>> = (0..4).map(|_| random_vec(&mut rng, 4)).collect();
        let zf = zf_precode(&effective).unwrap();
        let sol = assemble_solution(analog, zf, vec![1.0; 4], vec![1.0; 4]);
        for col in &sol.digital {
            let beam = hybrid_beam(&sol.analog, col);
            assert_abs_diff_eq!(beam.norm(), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn single_user_rate_is_log2_of_matched_snr() {
        let cfg = UraConfig::half_wavelength(16, 16, 28e9).unwrap();
        let p = SphericalPoint::boresight(2.0).unwrap();
        let h = los_channel(&cfg, &[PathSpec::los(p)]).unwrap();
        let codeword = crate::channel::steering_vector(
            &cfg,
            &p,
            crate::channel::DistanceModel::Expanded,
        );
        let effective = vec![vec![h.inner(&codeword)]];
        let zf = zf_precode(&effective).unwrap();
        let snr = 100.0;
        let sol = assemble_solution(vec![codeword], zf, vec![snr], vec![1.0]);
        let tally = sum_rate(std::slice::from_ref(&h), &sol);
        // perfect beam: |h^H W f|^2 = ||h||^2 = n_bs
        let expect = (1.0 + snr * cfg.n_bs() as f64).log2();
        assert_relative_eq!(tally.sum_bps_hz, expect, max_relative = 1e-9);
    }

    #[test]
    fn zero_power_means_zero_rate() {
        let cfg = UraConfig::half_wavelength(4, 4, 28e9).unwrap();
        let p = SphericalPoint::boresight(1.0).unwrap();
        let h = los_channel(&cfg, &[PathSpec::los(p)]).unwrap();
        let codeword =
            crate::channel::steering_vector(&cfg, &p, crate::channel::DistanceModel::Expanded);
        let effective = vec![vec![h.inner(&codeword)]];
        let zf = zf_precode(&effective).unwrap();
        let sol = assemble_solution(vec![codeword], zf, vec![0.0], vec![1.0]);
        let tally = sum_rate(&[h], &sol);
        assert_eq!(tally.sum_bps_hz, 0.0);
    }

    #[test]
    fn sum_rate_matches_scalar_reimplementation() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let n = 32;
        let analog: Vec<ComplexVector> = (0..3)
            .map(|_| {
                let mut v = ComplexVector::from_entries(random_vec(&mut rng, n));
                let norm = v.norm();
                v.scale(1.0 / norm);
                v
            })
            .collect();
        let channels: Vec<ComplexVector> = (0..3)
            .map(|_| ComplexVector::from_entries(random_vec(&mut rng, n)))
            .collect();
        let effective: Vec<Vec<Complex64>> = channels
            .iter()
            .map(|h| analog.iter().map(|c| h.inner(c)).collect())
            .collect();
        let zf = zf_precode(&effective).unwrap();
        let power = vec![3.0, 1.5, 0.25];
        let noise = vec![1.0, 0.5, 2.0];
        let sol = assemble_solution(analog, zf, power.clone(), noise.clone());
        let tally = sum_rate(&channels, &sol);

        // element-by-element re-derivation
        let beams: Vec<ComplexVector> = sol
            .digital
            .iter()
            .map(|col| hybrid_beam(&sol.analog, col))
            .collect();
        let mut expected_sum = 0.0;
        for (m, h) in channels.iter().enumerate() {
            let mut num = 0.0;
            let mut den = noise[m];
            for (l, beam) in beams.iter().enumerate() {
                let mut dot = Complex64::new(0.0, 0.0);
                for (a, b) in h.entries().iter().zip(beam.entries()) {
                    dot += a.conj() * b;
                }
                let term = dot.norm_sqr();
                if l == m {
                    num = power[m] * term;
                } else {
                    den += power[l] * term;
                }
            }
            let rate = (1.0 + num / den).log2();
            assert_relative_eq!(tally.per_user_bps_hz[m], rate, max_relative = 1e-12);
            expected_sum += rate;
        }
        assert_relative_eq!(tally.sum_bps_hz, expected_sum, max_relative = 1e-12);
    }
}
