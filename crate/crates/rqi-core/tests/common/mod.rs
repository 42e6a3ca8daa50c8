#![allow(dead_code)]

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rqi_core::geometry::LorentzTransform;
use rqi_core::Vec4;

pub fn unit3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return v.map(|x| x / n);
        }
    }
}

/// Unit timelike vector with rapidity below `max_rapidity`.
pub fn velocity(rng: &mut ChaCha8Rng, max_rapidity: f64) -> Vec4 {
    let d = unit3(rng);
    let eta: f64 = rng.random_range(0.0..max_rapidity);
    let (sh, ch) = (eta.sinh(), eta.cosh());
    Vec4::new(ch, sh * d[0], sh * d[1], sh * d[2])
}

pub fn lorentz(rng: &mut ChaCha8Rng, max_rapidity: f64) -> LorentzTransform {
    let rot = LorentzTransform::rotation(unit3(rng), rng.random_range(0.0..std::f64::consts::TAU));
    LorentzTransform::boost_to(&velocity(rng, max_rapidity)).compose(&rot)
}
