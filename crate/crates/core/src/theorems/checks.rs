use crate::error::WeightError;
use crate::operators::{maximal, natural_maximal, natural_minimal};
use crate::space::{BallId, Space};
use crate::weights::{
    a1_constant, ainf_constant, ap_constant, blo_norm, bmo_norm, buo_norm, check_finite,
    check_positive, dynamic_range, rhinf_constant, rhs_constant,
    transform, Transform,
};

use super::{inputs_digest, Assertion, CheckReport, Tolerances, Witness};

fn logs(w: &[f64]) -> Vec<f64> {
    w.iter().map(|v| v.ln()).collect()
}

fn neg(f: &[f64]) -> Vec<f64> {
    f.iter().map(|v| -v).collect()
}

fn check_weight_input(space: &Space, w: &[f64]) -> Result<(), WeightError> {
    if w.len() != space.len() {
        return Err(WeightError::LengthMismatch {
            expected: space.len(),
            found: w.len(),
        });
    }
    check_positive(w)
}

fn function_range(f: &[f64]) -> f64 {
    let (lo, hi) = f
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    (hi - lo).exp()
}

/// `M♮(log w) ≤ log M♮w ≤ M♮(log w) + log [w]_∞` and the same sandwich for
/// `m♮`, at every point.
pub fn check_commutation(
    space: &Space,
    w: &[f64],
    tol: &Tolerances,
) -> Result<[CheckReport; 2], WeightError> {
    check_weight_input(space, w)?;
    let inputs = inputs_digest(space, &[w], &[]);
    let range = dynamic_range(w);
    let lw = logs(w);
    let log_ainf = ainf_constant(space, w)?.value.ln();

    let mut out = Vec::with_capacity(2);
    for (id, op) in [
        ("commutation.max", natural_maximal as fn(&Space, &[f64]) -> _),
        ("commutation.min", natural_minimal),
    ] {
        let of_w = op(space, w);
        let of_log = op(space, &lw);
        let mut a = Assertion::new(tol, range);
        for x in 0..space.len() {
            let log_of = of_w.values[x].ln();
            let witness = Witness::at(x, of_w.witness[x]);
            a.le(of_log.values[x], log_of, witness);
            a.le(log_of, of_log.values[x] + log_ainf, witness);
        }
        out.push(a.finish(id, inputs.clone()));
    }
    Ok(out.try_into().unwrap())
}

/// `‖f‖_BLO = max_x (M♮f − f)(x)` and `‖f‖_BUO = max_x (f − m♮f)(x)`.
pub fn check_oscillation_characterization(
    space: &Space,
    f: &[f64],
    tol: &Tolerances,
) -> Result<[CheckReport; 2], WeightError> {
    if f.len() != space.len() {
        return Err(WeightError::LengthMismatch {
            expected: space.len(),
            found: f.len(),
        });
    }
    check_finite(f)?;
    let inputs = inputs_digest(space, &[f], &[]);
    let range = function_range(f);

    let upper = natural_maximal(space, f);
    let (gap, x) = argmax(upper.values.iter().zip(f).map(|(m, v)| m - v));
    let blo = blo_norm(space, f)?;
    let mut a = Assertion::new(tol, range);
    a.eq(blo.value, gap, Witness::at(x, upper.witness[x]));
    let first = a.finish("oscillation.blo", inputs.clone());

    let lower = natural_minimal(space, f);
    let (gap, x) = argmax(f.iter().zip(&lower.values).map(|(v, m)| v - m));
    let buo = buo_norm(space, f)?;
    let mut a = Assertion::new(tol, range);
    a.eq(buo.value, gap, Witness::at(x, lower.witness[x]));
    Ok([first, a.finish("oscillation.buo", inputs)])
}

/// For every ball: `max_B w ≤ [w]_1 [w⁻¹]_1 min_B w` and
/// `max_B w ≤ C_w [w]_p C_{w⁻¹} [w⁻¹]_p min_B w`.
pub fn check_harnack(
    space: &Space,
    w: &[f64],
    p: f64,
    tol: &Tolerances,
) -> Result<[CheckReport; 2], WeightError> {
    check_weight_input(space, w)?;
    let inputs = inputs_digest(space, &[w], &[p]);
    let range = dynamic_range(w);
    let inv = transform(w, &Transform::Inverse)?;
    let k1 = a1_constant(space, w)?.value * a1_constant(space, &inv)?.value;
    let kp = rhinf_constant(space, w)?.value
        * ap_constant(space, w, p)?.value
        * rhinf_constant(space, &inv)?.value
        * ap_constant(space, &inv, p)?.value;

    let family = space.family();
    let mut first = Assertion::new(tol, range);
    let mut second = Assertion::new(tol, range);
    let (mut hi, mut lo) = (Vec::new(), Vec::new());
    for c in 0..space.len() {
        family.rank_extremes(c, w, true, &mut hi);
        family.rank_extremes(c, w, false, &mut lo);
        for (k, (&max, &min)) in hi.iter().zip(&lo).enumerate() {
            let witness = Witness::ball(BallId { center: c, rank: k + 1 });
            first.le(max, k1 * min, witness);
            second.le(max, kp * min, witness);
        }
    }
    Ok([
        first.finish("harnack.a1", inputs.clone()),
        second.finish("harnack.ap", inputs),
    ])
}

/// `exp ‖log w‖_BLO ≤ [w]_1 ≤ [w]_∞ exp ‖log w‖_BLO`.
pub fn check_a1_characterization(
    space: &Space,
    w: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport, WeightError> {
    check_weight_input(space, w)?;
    let a1 = a1_constant(space, w)?;
    let ainf = ainf_constant(space, w)?.value;
    let blo = blo_norm(space, &logs(w))?;
    let mut a = Assertion::new(tol, dynamic_range(w));
    a.le(blo.value.exp(), a1.value, Witness::ball(a1.witness));
    a.le(a1.value, ainf * blo.value.exp(), Witness::ball(blo.witness));
    Ok(a.finish("theorem.a1", inputs_digest(space, &[w], &[])))
}

/// `C ≤ exp ‖log w‖_BUO ≤ C [w]_∞` with `C` the `RH_∞` constant.
pub fn check_rhinf_characterization(
    space: &Space,
    w: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport, WeightError> {
    check_weight_input(space, w)?;
    let c = rhinf_constant(space, w)?;
    let ainf = ainf_constant(space, w)?.value;
    let buo = buo_norm(space, &logs(w))?;
    let mut a = Assertion::new(tol, dynamic_range(w));
    a.le(c.value, buo.value.exp(), Witness::ball(c.witness));
    a.le(buo.value.exp(), c.value * ainf, Witness::ball(buo.witness));
    Ok(a.finish("theorem.rhinf", inputs_digest(space, &[w], &[])))
}

/// Pointwise chain behind `M(Mw) ≲ Mw`:
/// (a) `M♮(log w) ≤ log Mw ≤ log [w]_∞ + M♮(log w)`;
/// (b) the same with `Mw` in place of `w`;
/// (c) `M(Mw) ≤ [Mw]_∞ [w]_∞ exp(‖M♮ log w‖_BLO) Mw`.
pub fn check_converse_chain(
    space: &Space,
    w: &[f64],
    tol: &Tolerances,
) -> Result<[CheckReport; 3], WeightError> {
    check_weight_input(space, w)?;
    let inputs = inputs_digest(space, &[w], &[]);
    let range = dynamic_range(w);

    let sandwich = |v: &[f64], id: &str| -> Result<CheckReport, WeightError> {
        let mv = maximal(space, v);
        let nat_log = natural_maximal(space, &logs(v)).values;
        let log_ainf = ainf_constant(space, v)?.value.ln();
        let mut a = Assertion::new(tol, range);
        for x in 0..space.len() {
            let log_mv = mv.values[x].ln();
            let witness = Witness::at(x, mv.witness[x]);
            a.le(nat_log[x], log_mv, witness);
            a.le(log_mv, log_ainf + nat_log[x], witness);
        }
        Ok(a.finish(id, inputs.clone()))
    };
    let first = sandwich(w, "converse.a")?;
    let mw = maximal(space, w).values;
    let second = sandwich(&mw, "converse.b")?;

    let mmw = maximal(space, &mw);
    let g = natural_maximal(space, &logs(w)).values;
    let k = ainf_constant(space, &mw)?.value
        * ainf_constant(space, w)?.value
        * blo_norm(space, &g)?.value.exp();
    let mut a = Assertion::new(tol, range);
    for x in 0..space.len() {
        a.le(mmw.values[x], k * mw[x], Witness::at(x, mmw.witness[x]));
    }
    Ok([first, second, a.finish("converse.c", inputs)])
}

/// Power rules, with `q = s(p − 1) + 1`:
/// (a) `‖log wˢ‖_BLO = s‖log w‖_BLO`, `‖log wˢ‖_BUO = s‖log w‖_BUO`;
/// (b) `[w]_1 ≤ [w]_∞ [wˢ]_1^{1/s}`;
/// (c) `[wˢ]_{A_q} ≤ ([w]_{A_p} [w]_{RH_s})ˢ`;
/// (d) `[w]_{A_p} ≤ [wˢ]_{A_q}^{1/s}` and `[w]_{RH_s} ≤ [wˢ]_{A_q}^{1/s}`.
pub fn check_power_props(
    space: &Space,
    w: &[f64],
    s: f64,
    p: f64,
    tol: &Tolerances,
) -> Result<[CheckReport; 4], WeightError> {
    check_weight_input(space, w)?;
    let inputs = inputs_digest(space, &[w], &[s, p]);
    let ws = transform(w, &Transform::Power(s))?;
    let range = dynamic_range(w).max(dynamic_range(&ws));
    let q = s * (p - 1.0) + 1.0;
    let lw = logs(w);
    let lws = logs(&ws);

    let mut a = Assertion::new(tol, range);
    let blo = blo_norm(space, &lws)?;
    a.eq(blo.value, s * blo_norm(space, &lw)?.value, Witness::ball(blo.witness));
    let buo = buo_norm(space, &lws)?;
    a.eq(buo.value, s * buo_norm(space, &lw)?.value, Witness::ball(buo.witness));
    let first = a.finish("power.a", inputs.clone());

    let a1 = a1_constant(space, w)?;
    let mut a = Assertion::new(tol, range);
    a.le(
        a1.value,
        ainf_constant(space, w)?.value * a1_constant(space, &ws)?.value.powf(1.0 / s),
        Witness::ball(a1.witness),
    );
    let second = a.finish("power.b", inputs.clone());

    let aq = ap_constant(space, &ws, q)?;
    let ap = ap_constant(space, w, p)?;
    let rh = rhs_constant(space, w, s)?;
    let mut a = Assertion::new(tol, range);
    a.le(aq.value, (ap.value * rh.value).powf(s), Witness::ball(aq.witness));
    let third = a.finish("power.c", inputs.clone());

    let root = aq.value.powf(1.0 / s);
    let mut a = Assertion::new(tol, range);
    a.le(ap.value, root, Witness::ball(ap.witness));
    a.le(rh.value, root, Witness::ball(rh.witness));
    Ok([first, second, third, a.finish("power.d", inputs)])
}

/// `‖log φw‖_BUO ≤ ‖log φ‖_BUO + ‖log w‖_BUO` and `C_{φw} ≤ exp ‖log φw‖_BUO`.
pub fn check_multiplier(
    space: &Space,
    phi: &[f64],
    w: &[f64],
    tol: &Tolerances,
) -> Result<CheckReport, WeightError> {
    check_weight_input(space, phi)?;
    check_weight_input(space, w)?;
    let product = transform(w, &Transform::Product(phi.to_vec()))?;
    let range = dynamic_range(&product).max(dynamic_range(w)).max(dynamic_range(phi));
    let joint = buo_norm(space, &logs(&product))?;
    let mut a = Assertion::new(tol, range);
    a.le(
        joint.value,
        buo_norm(space, &logs(phi))?.value + buo_norm(space, &logs(w))?.value,
        Witness::ball(joint.witness),
    );
    let c = rhinf_constant(space, &product)?;
    a.le(c.value, joint.value.exp(), Witness::ball(c.witness));
    Ok(a.finish("multiplier", inputs_digest(space, &[phi, w], &[])))
}

/// `[w^{1−p}]_{A_p} = [w]_{A_{p′}}^{p−1}` and
/// `‖log w^{1−p}‖_BUO = (p − 1)‖log w‖_BLO`.
pub fn check_duality(
    space: &Space,
    w: &[f64],
    p: f64,
    tol: &Tolerances,
) -> Result<[CheckReport; 2], WeightError> {
    check_weight_input(space, w)?;
    let inputs = inputs_digest(space, &[w], &[p]);
    let sigma = transform(w, &Transform::Power(1.0 - p))?;
    let range = dynamic_range(w).max(dynamic_range(&sigma));
    let conj = p / (p - 1.0);

    let lhs = ap_constant(space, &sigma, p)?;
    let rhs = ap_constant(space, w, conj)?;
    let mut a = Assertion::new(tol, range);
    a.eq(lhs.value, rhs.value.powf(p - 1.0), Witness::ball(lhs.witness));
    let first = a.finish("duality.ap", inputs.clone());

    let buo = buo_norm(space, &logs(&sigma))?;
    let mut a = Assertion::new(tol, range);
    a.eq(
        buo.value,
        (p - 1.0) * blo_norm(space, &logs(w))?.value,
        Witness::ball(buo.witness),
    );
    Ok([first, a.finish("duality.oscillation", inputs)])
}

/// Quantities whose bounds involve unspecified constants, reported without
/// assertion, plus the two exact identities relating them.
///
/// Soft entries: `[Mw]_{RH_s}`, `[Mw]_1`, `[(Mwˢ)^{1/s}]_1`, and the ratios of
/// `‖M♮f‖_BLO`, `‖Mf‖_BLO`, `‖m♮f‖_BUO`, `‖mf‖_BUO` to `‖f‖_BMO` for
/// `f = log w`. Hard entries: `‖m♮f‖_BUO = ‖M♮(−f)‖_BLO` and
/// `‖Mf‖_BLO = ‖M♮|f|‖_BLO`.
pub fn report_unquantified(
    space: &Space,
    w: &[f64],
    s: f64,
    tol: &Tolerances,
) -> Result<Vec<CheckReport>, WeightError> {
    check_weight_input(space, w)?;
    let inputs = inputs_digest(space, &[w], &[s]);
    let mw = maximal(space, w).values;
    let ws = transform(w, &Transform::Power(s))?;
    let root: Vec<f64> = maximal(space, &ws).values.iter().map(|v| v.powf(1.0 / s)).collect();

    let mut out = Vec::new();
    let rh = rhs_constant(space, &mw, s)?;
    out.push(CheckReport::soft("unquantified.rhs_mw", inputs.clone(), rh.value, 1.0, Witness::ball(rh.witness)));
    let a1 = a1_constant(space, &mw)?;
    out.push(CheckReport::soft("unquantified.a1_mw", inputs.clone(), a1.value, 1.0, Witness::ball(a1.witness)));
    let a1 = a1_constant(space, &root)?;
    out.push(CheckReport::soft("unquantified.a1_mws", inputs.clone(), a1.value, 1.0, Witness::ball(a1.witness)));

    let f = logs(w);
    let abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let bmo = bmo_norm(space, &f)?.value;
    let nat_max = natural_maximal(space, &f).values;
    let max = maximal(space, &f).values;
    let nat_min = natural_minimal(space, &f).values;
    let min = crate::operators::minimal(space, &f).values;
    let blo_nat = blo_norm(space, &nat_max)?;
    let blo_max = blo_norm(space, &max)?;
    let buo_nat = buo_norm(space, &nat_min)?;
    let buo_min = buo_norm(space, &min)?;
    for (id, r) in [
        ("ratio.blo_natural_max", &blo_nat),
        ("ratio.blo_max", &blo_max),
        ("ratio.buo_natural_min", &buo_nat),
        ("ratio.buo_min", &buo_min),
    ] {
        out.push(CheckReport::soft(id, inputs.clone(), r.value, bmo, Witness::ball(r.witness)));
    }

    let range = function_range(&f);
    let mut a = Assertion::new(tol, range);
    let reflected = blo_norm(space, &natural_maximal(space, &neg(&f)).values)?;
    a.eq(buo_nat.value, reflected.value, Witness::ball(buo_nat.witness));
    out.push(a.finish("identity.min_buo", inputs.clone()));

    let mut a = Assertion::new(tol, range);
    let of_abs = blo_norm(space, &natural_maximal(space, &abs).values)?;
    a.eq(blo_max.value, of_abs.value, Witness::ball(blo_max.witness));
    out.push(a.finish("identity.max_blo", inputs));
    Ok(out)
}

/// Harness self-test: the true bound `[w]_1 ≤ 2[w]_1` with its sides
/// swapped. Always fails.
pub fn self_test_inverted(space: &Space, w: &[f64], tol: &Tolerances) -> Result<CheckReport, WeightError> {
    let a1 = a1_constant(space, w)?;
    let mut a = Assertion::new(tol, dynamic_range(w));
    a.le(2.0 * a1.value, a1.value, Witness::ball(a1.witness));
    Ok(a.finish("selftest.inverted", inputs_digest(space, &[w], &[])))
}

fn argmax(values: impl Iterator<Item = f64>) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, v) in values.enumerate() {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}
