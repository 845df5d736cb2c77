use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConformalModel, FlatConformalField};
use crate::classifier::{classify, Verdict};
use crate::constants::RK4_STEP;
use crate::error::{Error, Result};
use crate::rational::{self, Rat};

const WEYL_SAMPLES: usize = 8;
const WEYL_SAMPLE_SEED: u64 = 0x3e71;
const WEYL_SAMPLE_SPREAD: f64 = 0.3;

/// Integrates `dg/dt = Ξ g` from `g(0) = start` to time `t` with classical
/// RK4, stopping with an error when `g·o` leaves the chart.
pub fn rk4_flow(model: &ConformalModel, xi: &DMatrix<f64>, start: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    let steps = (t.abs() / RK4_STEP).ceil() as usize;
    if steps == 0 {
        return Ok(start.clone());
    }
    let h = t / steps as f64;
    let mut g = start.clone();
    let side = start[(0, 0)].signum();
    for i in 0..steps {
        let k1 = xi * &g;
        let k2 = xi * (&g + &k1 * (h / 2.0));
        let k3 = xi * (&g + &k2 * (h / 2.0));
        let k4 = xi * (&g + &k3 * h);
        g += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        // v_0 cannot change sign without passing through infinity of the chart
        if model.chart_of(g.column(0).as_slice()).is_none() || g[(0, 0)].signum() != side {
            return Err(Error::Integration { escape_time: h * (i + 1) as f64 });
        }
    }
    Ok(g)
}

/// `M = L D U` with block-unipotent `L` (lower) and `U` (upper) and
/// block-diagonal `D`.
#[derive(Clone, Debug)]
pub struct BlockLdu {
    pub lower: DMatrix<f64>,
    pub diagonal: DMatrix<f64>,
    pub upper: DMatrix<f64>,
}

pub fn block_ldu(m: &DMatrix<f64>, sizes: &[usize]) -> Option<BlockLdu> {
    let n = m.nrows();
    let mut offsets = vec![0];
    for s in sizes {
        offsets.push(offsets.last().unwrap() + s);
    }
    if *offsets.last().unwrap() != n || m.ncols() != n {
        return None;
    }
    let mut s = m.clone();
    let mut lower = DMatrix::identity(n, n);
    let mut upper = DMatrix::identity(n, n);
    let mut diagonal = DMatrix::zeros(n, n);
    for (b, &size) in sizes.iter().enumerate() {
        let o = offsets[b];
        let pivot = s.view((o, o), (size, size)).into_owned();
        let inv = pivot.clone().try_inverse()?;
        diagonal.view_mut((o, o), (size, size)).copy_from(&pivot);
        let rest = n - o - size;
        if rest == 0 {
            continue;
        }
        let below = s.view((o + size, o), (rest, size)).into_owned();
        let right = s.view((o, o + size), (size, rest)).into_owned();
        let l = &below * &inv;
        let u = &inv * &right;
        lower.view_mut((o + size, o), (rest, size)).copy_from(&l);
        upper.view_mut((o, o + size), (size, rest)).copy_from(&u);
        let schur = s.view((o + size, o + size), (rest, rest)) - &l * &right;
        s.view_mut((o + size, o + size), (rest, rest)).copy_from(&schur);
    }
    Some(BlockLdu { lower, diagonal, upper })
}

fn to_f64(v: &[Rat]) -> Vec<f64> {
    v.iter().map(rational::to_f64).collect()
}

/// Compares the flowed point `Φ_t(u exp(Y))` with `u exp(Ad(h^t) Y) h^t`.
///
/// Returns the larger of the group-element and chart-coordinate distances.
pub fn equivariance_check(
    field: &FlatConformalField,
    x: &[Rat],
    y: &crate::algebra::Element,
    t: f64,
) -> Result<f64> {
    let model = field.model();
    let algebra = model.algebra();
    model.direction(y)?;
    let datum = field.holonomy_at(x)?;
    let u = model.gauge_f64(&to_f64(x));
    let rho_y = algebra.realize_f64(&y.to_f64())?;
    let rho_xi = algebra.realize_f64(&field.element().to_f64())?;
    let rho_h = algebra.realize_f64(&datum.x().to_f64())?;

    let flowed = rk4_flow(model, &rho_xi, &(&u * rho_y.clone().exp()), t)?;
    let h = (&rho_h * t).exp();
    let h_inv = (&rho_h * -t).exp();
    let predicted = &u * (&h * &rho_y * &h_inv).exp() * &h;

    let group = (&flowed - &predicted).amax();
    let chart = match (model.chart_of(flowed.column(0).as_slice()), model.chart_of(predicted.column(0).as_slice())) {
        (Some(a), Some(b)) => a.iter().zip(&b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs())),
        _ => return Err(Error::Integration { escape_time: t }),
    };
    Ok(group.max(chart))
}

/// Commutation defect of the flow with the exponential-coordinate Weyl
/// section `σ(u' exp(Y) g_0 P_+) = u' exp(Y) g_0` built in the witness
/// gauge `u' = u exp(-Z)`.
///
/// A flowed point `w` stays in the image of `σ` iff `u'^{-1} w` has trivial
/// `P_+` factor in its block `L D U` decomposition; the largest entry of
/// `U - I` over the sample points is returned.
pub fn weyl_section_check(field: &FlatConformalField, x: &[Rat], t: f64) -> Result<f64> {
    let model = field.model();
    let algebra = model.algebra();
    let datum = field.holonomy_at(x)?;
    let classification = classify(&datum)?;
    if classification.verdict == Verdict::Essential {
        return Err(Error::HypothesisNotSatisfied(
            "the holonomy is not conjugate into g_0, so no invariant Weyl section exists".into(),
        ));
    }
    let z = classification.witness.expect("reducible verdicts carry a witness");
    let u = model.gauge_f64(&to_f64(x));
    let gauge = &u * (algebra.realize_f64(&z.to_f64())? * -1.0).exp();
    section_defect(field, &gauge, t)
}

fn section_defect(field: &FlatConformalField, gauge: &DMatrix<f64>, t: f64) -> Result<f64> {
    let model = field.model();
    let algebra = model.algebra();
    let gauge_inv = gauge.clone().try_inverse().ok_or_else(|| Error::Invariant("singular gauge".into()))?;
    let rho_xi = algebra.realize_f64(&field.element().to_f64())?;
    let n = model.dim();
    let sizes = [1, n, 1];

    let mut rng = ChaCha8Rng::seed_from_u64(WEYL_SAMPLE_SEED);
    let mut worst = 0.0f64;
    for _ in 0..WEYL_SAMPLES {
        let mut sample = |grade: i32| -> Vec<f64> {
            (0..algebra.dim())
                .map(|i| {
                    if algebra.grade_of(i) == grade {
                        rng.gen_range(-WEYL_SAMPLE_SPREAD..WEYL_SAMPLE_SPREAD)
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let y = algebra.realize_f64(&sample(-1))?.exp();
        let g0 = algebra.realize_f64(&sample(0))?.exp();
        let q = gauge * y * g0;
        let w = rk4_flow(model, &rho_xi, &q, t)?;
        let ldu = block_ldu(&(&gauge_inv * w), &sizes)
            .ok_or_else(|| Error::Integration { escape_time: t })?;
        let defect = (ldu.upper - DMatrix::identity(n + 2, n + 2)).amax();
        worst = worst.max(defect);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn model3() -> ConformalModel {
        ConformalModel::new(3, 0).unwrap()
    }

    fn origin() -> Vec<Rat> {
        vec![rat(0); 3]
    }

    fn field(m: &ConformalModel, terms: &[(&str, Rat)]) -> FlatConformalField {
        FlatConformalField::from_element(m.algebra().combination(terms).unwrap()).unwrap()
    }

    #[test]
    fn ldu_reconstructs() {
        let m = DMatrix::from_row_slice(4, 4, &[
            2.0, 1.0, 0.5, 1.0, //
            1.0, 3.0, 0.0, 2.0, //
            0.0, 1.0, 4.0, 1.0, //
            1.0, 0.0, 1.0, 5.0,
        ]);
        let f = block_ldu(&m, &[1, 2, 1]).unwrap();
        assert!((&f.lower * &f.diagonal * &f.upper - &m).amax() < 1e-12);
        assert!(f.upper[(1, 2)].abs() < 1e-15 && f.lower[(2, 1)].abs() < 1e-15);
    }

    #[test]
    fn equivariance_at_time_zero() {
        let m = model3();
        let f = field(&m, &[("D", rat(1))]);
        let y = m.algebra().named("P_1").unwrap();
        assert_eq!(equivariance_check(&f, &origin(), &y, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rotation_and_dilation_equivariance() {
        let m = model3();
        let y = m.algebra().named("P_1").unwrap();
        for name in ["M_12", "D"] {
            let f = field(&m, &[(name, rat(1))]);
            assert!(equivariance_check(&f, &origin(), &y, 0.1).unwrap() < 1e-6);
        }
    }

    #[test]
    fn dilation_scales_translations() {
        // Ad(exp(tD)) P_1 = e^{-t} P_1
        let m = model3();
        let a = m.algebra();
        let t = 0.1;
        let h = (a.realize_f64(&a.named("D").unwrap().to_f64()).unwrap() * t).exp();
        let p = a.realize_f64(&a.named("P_1").unwrap().to_f64()).unwrap();
        let ad = &h * &p * h.clone().try_inverse().unwrap();
        assert!((ad - p * (-t).exp()).amax() < 1e-14);
    }

    #[test]
    fn weyl_section_examples() {
        let m = model3();
        for terms in [vec![("M_12", rat(1))], vec![("D", rat(1))], vec![("M_12", rat(1)), ("K_1", rat(1))]] {
            let f = field(&m, &terms);
            assert!(weyl_section_check(&f, &origin(), 0.1).unwrap() < 1e-6);
        }
        // in the untwisted gauge the holonomy of M_12 + K_1 leaves G_0 and the defect shows
        let mk = field(&m, &[("M_12", rat(1)), ("K_1", rat(1))]);
        assert!(section_defect(&mk, &m.gauge_f64(&[0.0; 3]), 0.1).unwrap() > 1e-3);
        let k = field(&m, &[("K_1", rat(1))]);
        assert!(matches!(weyl_section_check(&k, &origin(), 0.1), Err(Error::HypothesisNotSatisfied(_))));
    }

    #[test]
    fn escaping_flow_reports_time() {
        // along the x_1 axis the field of K_1 is -x_1², which blows up at t = -1 from x_1 = 1
        let m = model3();
        let f = field(&m, &[("K_1", rat(1))]);
        let xi = m.algebra().realize_f64(&f.element().to_f64()).unwrap();
        let start = m.gauge_f64(&[1.0, 0.0, 0.0]);
        assert!(rk4_flow(&m, &xi, &start, 2.0).is_ok());
        match rk4_flow(&m, &xi, &start, -2.0) {
            Err(Error::Integration { escape_time }) => assert!((escape_time + 1.0).abs() < 0.01),
            other => panic!("expected escape, got {other:?}"),
        }
    }
}
