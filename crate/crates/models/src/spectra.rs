//! Spectrum generators for the model families.

use crate::Result;
use spectral_core::Spectrum;
use std::io::Write;

/// Dirichlet Laplacian on `[0, π]` scaled by `a` and shifted by `alpha`: `a n² + α`.
pub fn spectrum_interval(m: usize, a: f64, alpha: f64) -> Result<Spectrum> {
    if !(a > 0.0) || alpha < 0.0 {
        return Err(crate::ModelError::Invalid(format!("a={a}, alpha={alpha}")));
    }
    let vals = (1..=m).map(|n| a * (n * n) as f64 + alpha).collect();
    let labels = (1..=m).map(|n| n.to_string()).collect();
    Ok(Spectrum::new(vals, format!("interval(a={a},alpha={alpha})"))?.with_labels(labels)?)
}

fn lattice_spectrum<const D: usize>(lambda_max: u64, alpha: f64, source: String) -> Result<Spectrum> {
    let r = (lambda_max as f64).sqrt().floor() as i64;
    let mut pts: Vec<(u64, [i64; D])> = Vec::new();
    let mut p = [-r; D];
    loop {
        let n2: u64 = p.iter().map(|x| (x * x) as u64).sum();
        if n2 <= lambda_max && (n2 > 0 || alpha > 0.0) {
            pts.push((n2, p));
        }
        let mut i = 0;
        loop {
            if i == D {
                pts.sort_unstable();
                let vals = pts.iter().map(|(n2, _)| *n2 as f64 + alpha).collect();
                let labels = pts
                    .iter()
                    .map(|(_, p)| {
                        let s: Vec<String> = p.iter().map(|x| x.to_string()).collect();
                        format!("({})", s.join(","))
                    })
                    .collect();
                return Ok(Spectrum::new(vals, source)?.with_labels(labels)?);
            }
            p[i] += 1;
            if p[i] <= r {
                break;
            }
            p[i] = -r;
            i += 1;
        }
    }
}

/// Periodic Laplacian on the 2-torus: every lattice point `(n, k) ≠ 0` with `n² + k² ≤ lambda_max`.
pub fn spectrum_torus2d(lambda_max: u64) -> Result<Spectrum> {
    lattice_spectrum::<2>(lambda_max, 0.0, "torus2d".into())
}

/// `-Δ + α` on the 2-torus; the constant mode is kept at eigenvalue `α > 0`.
pub fn spectrum_torus2d_shifted(lambda_max: u64, alpha: f64) -> Result<Spectrum> {
    lattice_spectrum::<2>(lambda_max, alpha, format!("torus2d(alpha={alpha})"))
}

/// Periodic Laplacian on the 3-torus, zero mode excluded.
pub fn spectrum_torus3d(lambda_max: u64) -> Result<Spectrum> {
    lattice_spectrum::<3>(lambda_max, 0.0, "torus3d".into())
}

pub fn spectrum_torus3d_shifted(lambda_max: u64, alpha: f64) -> Result<Spectrum> {
    lattice_spectrum::<3>(lambda_max, alpha, format!("torus3d(alpha={alpha})"))
}

/// Laplace–Beltrami on the round 2-sphere: `n(n+1)` with multiplicity `2n+1`.
pub fn spectrum_sphere2(n_max: usize) -> Result<Spectrum> {
    let mut vals = Vec::new();
    let mut labels = Vec::new();
    for n in 1..=n_max {
        for m in -(n as i64)..=(n as i64) {
            vals.push((n * (n + 1)) as f64);
            labels.push(format!("({n},{m})"));
        }
    }
    Ok(Spectrum::new(vals, "sphere2")?.with_labels(labels)?)
}

/// Kuramoto–Sivashinsky type: `(N² + a)² + 1`, sorted.
pub fn spectrum_ks(m: usize, a: f64) -> Result<Spectrum> {
    let mut v: Vec<(f64, usize)> =
        (1..=m).map(|n| (((n * n) as f64 + a).powi(2) + 1.0, n)).collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let labels = v.iter().map(|(_, n)| n.to_string()).collect();
    Ok(Spectrum::new(v.into_iter().map(|x| x.0).collect(), format!("ks(a={a})"))?
        .with_labels(labels)?)
}

/// Synthetic Swift–Hohenberg-like sequence `c N^{4/3}`.
pub fn spectrum_sh(m: usize, c: f64) -> Result<Spectrum> {
    let vals = (1..=m).map(|n| c * (n as f64).powf(4.0 / 3.0)).collect();
    Ok(Spectrum::new(vals, format!("sh(c={c})"))?)
}

/// Cahn–Hilliard: squares of a Laplacian spectrum.
pub fn spectrum_ch(base: &Spectrum) -> Result<Spectrum> {
    let vals = base.values().iter().map(|x| x * x).collect();
    let s = Spectrum::new(vals, format!("ch({})", base.source()))?;
    Ok(match base.labels() {
        Some(l) => s.with_labels(l.to_vec())?,
        None => s,
    })
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Two-squares theorem: every prime `≡ 3 (mod 4)` divides `n` to an even power.
pub fn is_sum_of_two_squares(n: u64) -> bool {
    if n == 0 {
        return true;
    }
    factor(n).iter().all(|&(p, e)| p % 4 != 3 || e % 2 == 0)
}

/// Legendre: `n` is a sum of three squares iff it is not `4^l (8k + 7)`.
pub fn is_sum_of_three_squares(mut n: u64) -> bool {
    if n == 0 {
        return true;
    }
    while n % 4 == 0 {
        n /= 4;
    }
    n % 8 != 7
}

/// Writes `index,eigenvalue,label` rows (1-based index).
pub fn write_spectrum_csv<W: Write>(spec: &Spectrum, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["index", "eigenvalue", "label"])?;
    for (i, v) in spec.values().iter().enumerate() {
        let label = spec.labels().map(|l| l[i].as_str()).unwrap_or("");
        wr.write_record([(i + 1).to_string(), format!("{v}"), label.to_string()])?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn distinct(s: &Spectrum) -> Vec<u64> {
        s.levels().iter().map(|(v, _)| *v as u64).collect()
    }

    #[test]
    fn interval_values() {
        let s = spectrum_interval(4, 1.0, 0.0).unwrap();
        assert_eq!(s.values(), &[1.0, 4.0, 9.0, 16.0]);
        let t = spectrum_interval(4, 1.0, 5.0).unwrap();
        for i in 0..3 {
            assert_eq!(t.values()[i + 1] - t.values()[i], s.values()[i + 1] - s.values()[i]);
            assert_eq!(s.values()[i + 1] - s.values()[i], (2 * i + 3) as f64);
        }
    }

    #[test]
    fn torus2d_small() {
        let s = spectrum_torus2d(13).unwrap();
        assert_eq!(distinct(&s), vec![1, 2, 4, 5, 8, 9, 10, 13]);
        // multiplicities r_2(n)
        let lv = s.levels();
        assert_eq!(lv[0].1, 4);
        assert_eq!(lv[1].1, 4);
        assert_eq!(lv[3].1, 8);
        let sh = spectrum_torus2d_shifted(2, 0.5).unwrap();
        assert_eq!(sh.values()[0], 0.5);
        assert_eq!(sh.labels().unwrap()[0], "(0,0)");
    }

    #[test]
    fn sphere_counts() {
        let s = spectrum_sphere2(3).unwrap();
        assert_eq!(s.levels(), vec![(2.0, 3), (6.0, 5), (12.0, 7)]);
        for n in 1..12 {
            assert_eq!(spectrum_sphere2(n).unwrap().len(), n * (n + 2));
        }
    }

    #[test]
    fn torus3d_small() {
        let s = spectrum_torus3d(30).unwrap();
        let d = distinct(&s);
        for v in 1..=6 {
            assert!(d.contains(&v));
        }
        assert!(!d.contains(&7) && !d.contains(&15) && !d.contains(&28));
        assert_eq!(s.levels()[0].1, 6);
    }

    #[test]
    fn ks_sh_ch() {
        let s = spectrum_ks(4, 0.0).unwrap();
        assert_eq!(s.values(), &[2.0, 17.0, 82.0, 257.0]);
        let sh = spectrum_sh(3, 1.0).unwrap();
        assert!((sh.values()[2] - 3f64.powf(4.0 / 3.0)).abs() < 1e-12);
        let ch = spectrum_ch(&spectrum_interval(3, 1.0, 0.0).unwrap()).unwrap();
        assert_eq!(ch.values(), &[1.0, 16.0, 81.0]);
    }

    #[test]
    fn gauss_membership_small() {
        let two: Vec<u64> = (1..30).filter(|&n| is_sum_of_two_squares(n)).collect();
        assert_eq!(two, vec![1, 2, 4, 5, 8, 9, 10, 13, 16, 17, 18, 20, 25, 26, 29]);
        let not3: Vec<u64> = (1..40).filter(|&n| !is_sum_of_three_squares(n)).collect();
        assert_eq!(not3, vec![7, 15, 23, 28, 31, 39]);
    }

    #[test]
    fn csv_export() {
        let s = spectrum_interval(2, 1.0, 0.0).unwrap();
        let mut buf = Vec::new();
        write_spectrum_csv(&s, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "index,eigenvalue,label\n1,1,1\n2,4,2\n");
    }
}
