//! Balanced homodyne detection of two U(1) frames.
//!
//! Modes a and b meet on a 50:50 beam splitter with outputs
//! c = (a - b)/√2 and d = (a + b)/√2. The outcome (j, m) means 2j photons in
//! total with j + m counted in c.

use crate::frame::{FrameKind, FrameState};
use crate::group::GroupElement;
use crate::{QrfError, C64};

/// Truncation of the (j, m) grid for two coherent inputs: the Poisson tail
/// in total photon number left out is below this.
pub const GRID_TAIL: f64 = 1e-9;

fn ln_factorial(n: u64) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn check_jm(two_j: u32, two_m: i32) -> Result<(), QrfError> {
    if two_m.unsigned_abs() > two_j || (two_j as i64 - two_m as i64) % 2 != 0 {
        return Err(QrfError::InvalidArgument(format!(
            "(2j, 2m) = ({two_j}, {two_m}) is not a valid outcome"
        )));
    }
    Ok(())
}

fn u1_phase(state: &FrameState) -> Result<f64, QrfError> {
    match state.orientation {
        GroupElement::U1(t) => Ok(t),
        GroupElement::SU2(_) => Err(QrfError::UnsupportedStateKind("SU(2) frame")),
    }
}

/// Closed form for coherent inputs s_A e^{ia}, s_B e^{ib}:
/// e^{-s_A²-s_B²} 2^{-2j} |α-β|^{2(j+m)} |α+β|^{2(j-m)} / ((j+m)!(j-m)!).
pub fn bhd_coherent(two_j: u32, two_m: i32, s_a: f64, a: f64, s_b: f64, b: f64) -> f64 {
    let alpha = C64::from_polar(s_a, a);
    let beta = C64::from_polar(s_b, b);
    let np = ((two_j as i64 + two_m as i64) / 2) as u64;
    let nm = ((two_j as i64 - two_m as i64) / 2) as u64;
    let term = |z: C64, n: u64| -> Option<f64> {
        if n == 0 {
            Some(0.0)
        } else if z.norm() == 0.0 {
            None
        } else {
            Some(2.0 * n as f64 * z.norm().ln())
        }
    };
    let (Some(lp), Some(lm)) = (term(alpha - beta, np), term(alpha + beta, nm)) else {
        return 0.0;
    };
    (-s_a * s_a - s_b * s_b - two_j as f64 * 2f64.ln() + lp + lm
        - ln_factorial(np)
        - ln_factorial(nm))
    .exp()
}

/// Amplitude ⟨n1, n2| BS |k, l⟩ with n1 + n2 = k + l.
fn splitter_amplitude(k: usize, l: usize, n1: usize) -> f64 {
    let n = k + l;
    let n2 = n - n1;
    let mut sum = 0.0;
    for q in 0..=l.min(n1) {
        let p = n1 - q;
        if p > k {
            continue;
        }
        let c = (ln_factorial(k as u64) - ln_factorial(p as u64) - ln_factorial((k - p) as u64)
            + ln_factorial(l as u64)
            - ln_factorial(q as u64)
            - ln_factorial((l - q) as u64))
        .exp();
        sum += if q % 2 == 0 { c } else { -c };
    }
    let scale = (0.5
        * (ln_factorial(n1 as u64) + ln_factorial(n2 as u64)
            - ln_factorial(k as u64)
            - ln_factorial(l as u64))
        - n as f64 * 0.5 * 2f64.ln())
    .exp();
    scale * sum
}

/// Outcome probability by propagating the two Fock-basis state vectors
/// through the beam splitter.
pub fn bhd_fock(two_j: u32, two_m: i32, a: &[C64], b: &[C64]) -> f64 {
    let n = two_j as usize;
    let n1 = ((two_j as i64 + two_m as i64) / 2) as usize;
    let mut amp = C64::new(0.0, 0.0);
    for k in 0..=n {
        let l = n - k;
        if k >= a.len() || l >= b.len() {
            continue;
        }
        amp += a[k] * b[l] * splitter_amplitude(k, l, n1);
    }
    amp.norm_sqr()
}

/// P^j_m for two U(1) frame states. Two coherent states use the closed form;
/// any other pairing is propagated exactly from the stored (truncated)
/// number-basis vectors.
pub fn bhd_probability(
    two_j: u32,
    two_m: i32,
    state_a: &FrameState,
    state_b: &FrameState,
) -> Result<f64, QrfError> {
    check_jm(two_j, two_m)?;
    let (a, b) = (u1_phase(state_a)?, u1_phase(state_b)?);
    if let (FrameKind::U1Coherent { amplitude: sa }, FrameKind::U1Coherent { amplitude: sb }) =
        (state_a.kind, state_b.kind)
    {
        return Ok(bhd_coherent(two_j, two_m, sa, a, sb, b));
    }
    Ok(bhd_fock(
        two_j,
        two_m,
        state_a.vector.as_slice(),
        state_b.vector.as_slice(),
    ))
}

/// Probability that phase eigenstates of sizes s_A, s_B deliver 2j photons in
/// total: the number of (k_A, k_B) splittings over (s_A+1)(s_B+1).
pub fn bhd_phase_eigenstate_total(two_j: u32, s_a: usize, s_b: usize) -> f64 {
    let n = two_j as usize;
    if n > s_a + s_b {
        return 0.0;
    }
    let count = n.min(s_a).min(s_b).min(s_a + s_b - n) + 1;
    count as f64 / ((s_a + 1) * (s_b + 1)) as f64
}

/// Every outcome (2j, 2m, P) on the grid used for normalisation checks.
pub fn bhd_distribution(
    state_a: &FrameState,
    state_b: &FrameState,
) -> Result<Vec<(u32, i32, f64)>, QrfError> {
    let max_total = match (state_a.kind, state_b.kind) {
        (FrameKind::U1Coherent { amplitude: sa }, FrameKind::U1Coherent { amplitude: sb }) => {
            // total photon number is Poisson(s_A² + s_B²)
            let mean = sa * sa + sb * sb;
            let mut p = (-mean).exp();
            let mut cum = p;
            let mut n = 0u32;
            while 1.0 - cum > GRID_TAIL {
                n += 1;
                p *= mean / n as f64;
                cum += p;
            }
            n
        }
        (ka, kb) => {
            for k in [ka, kb] {
                if k.group() != crate::group::Group::U1 {
                    return Err(QrfError::UnsupportedStateKind("SU(2) frame"));
                }
            }
            (state_a.vector.len() + state_b.vector.len() - 2) as u32
        }
    };
    let mut out = Vec::new();
    for two_j in 0..=max_total {
        for two_m in (-(two_j as i32)..=two_j as i32).step_by(2) {
            out.push((
                two_j,
                two_m,
                bhd_probability(two_j, two_m, state_a, state_b)?,
            ));
        }
    }
    Ok(out)
}
