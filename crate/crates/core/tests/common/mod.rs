#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqzvac::{AtomConfig, BathConfig, PhaseModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random point with `gamma` in [0.5, 2], `epsilon < 0.45 gamma`, drive and
/// detuning of order `gamma`, and small level shifts.
pub fn draw(rng: &mut ChaCha8Rng) -> (AtomConfig, BathConfig) {
    let gamma = rng.random_range(0.5..2.0);
    let epsilon = rng.random_range(0.0..0.45) * gamma;
    let omega = rng.random_range(0.1..3.0) * gamma;
    let delta = rng.random_range(-2.0..2.0) * gamma;
    let xi = rng.random_range(0.05..1.0);
    let phi = rng.random_range(0.0..2.0 * PI);
    let delta_n = rng.random_range(-0.05..0.05);
    let delta_m = rng.random_range(0.0..0.3);
    let bath = BathConfig::new(gamma, epsilon)
        .with_phase(PhaseModel::Constant(phi))
        .with_shifts(delta_n, delta_m);
    (AtomConfig::new(omega, delta).with_xi(xi), bath)
}

/// Draws until the effective coefficients pass the physicality check.
pub fn draw_physical(rng: &mut ChaCha8Rng) -> (AtomConfig, BathConfig, sqzvac::EffectiveParams) {
    loop {
        let (atom, bath) = draw(rng);
        if let Ok(p) = sqzvac::effective_params(&atom, &bath) {
            if p.physicality().passes {
                return (atom, bath, p);
            }
        }
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

pub fn column(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}
