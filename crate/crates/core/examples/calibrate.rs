//! Re-runs the constant fits and compares them with the frozen values.

use linkbench::calibration::{self, ANCHOR_C_TOTAL_FF, ANCHOR_SENSITIVITY_DBM};
use linkbench::elec_energy::ElectricalLinkParams;
use linkbench::opt_link::OpticalLinkParams;
use linkbench::rx_model::{self, Integration, RxNoiseParams};

fn main() -> Result<(), linkbench::Error> {
    let rx = RxNoiseParams::default();
    let k = calibration::fit_tia_noise_coefficient(&rx, ANCHOR_C_TOTAL_FF, ANCHOR_SENSITIVITY_DBM)?;
    println!("tia_noise_coefficient  fitted {k:.6e}  frozen {:.6e}", calibration::TIA_NOISE_COEFFICIENT);
    let rx = RxNoiseParams {
        tia_noise_coefficient: k,
        ..rx
    };
    let s_mono = rx_model::oma_sensitivity(ANCHOR_C_TOTAL_FF, &rx)?;
    let s_dbi = rx_model::oma_sensitivity(Integration::Dbi.c_total_ff(rx.pd_capacitance_ff), &rx)?;
    println!("held-out check: 28 fF - 3.2 fF = {:.3} dB", s_dbi - s_mono);

    let e = ElectricalLinkParams::default();
    let o = OpticalLinkParams::default();
    let fit = calibration::fit_link_constants(&e, &o, &rx, e.vdd_v)?;
    println!(
        "min_receiver_swing_mv  fitted {:.4}  frozen {}",
        fit.min_receiver_swing_mv,
        calibration::MIN_RECEIVER_SWING_MV
    );
    println!(
        "optical_tia_energy_fj  fitted {:.4}  frozen {}",
        fit.optical_tia_energy_fj,
        calibration::OPTICAL_TIA_ENERGY_FJ
    );
    Ok(())
}
