//! Physical constants (CODATA 2018).

/// Fine-structure constant α.
pub const FINE_STRUCTURE: f64 = 7.297_352_569_3e-3;

/// Planck constant in eV·s, used for every eV ↔ Hz conversion.
pub const PLANCK_EV_S: f64 = 4.135_667_696e-15;

/// Metrological systematic floor of trapped-ion spectroscopy (eV).
pub const METROLOGICAL_FLOOR_EV: f64 = 1e-21;

/// `(Zα)²`
pub fn z_alpha_squared(z: u32) -> f64 {
    let za = f64::from(z) * FINE_STRUCTURE;
    za * za
}

pub fn hz_to_ev(hz: f64) -> f64 {
    hz * PLANCK_EV_S
}

pub fn ev_to_hz(ev: f64) -> f64 {
    ev / PLANCK_EV_S
}
