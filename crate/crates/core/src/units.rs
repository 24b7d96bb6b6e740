//! Small unit conversions shared by the link models.

/// Speed of light in vacuum (m/s).
pub const C0: f64 = 299_792_458.0;
/// Vacuum permeability (H/m).
pub const MU0: f64 = 4.0e-7 * std::f64::consts::PI;
/// Elementary charge (C).
pub const Q_E: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K).
pub const K_B: f64 = 1.380_649e-23;

/// Nepers to decibels.
pub const DB_PER_NEPER: f64 = 8.685_889_638_065_037;

pub fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn lin_to_db(lin: f64) -> f64 {
    10.0 * lin.log10()
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    dbm_to_mw(dbm) * 1e-3
}

pub fn w_to_dbm(w: f64) -> f64 {
    mw_to_dbm(w * 1e3)
}
