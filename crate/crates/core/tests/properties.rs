use proptest::prelude::*;

use linkbench::bw_density::{self, BumpArraySpec, BumpPattern, PitchProfileTable, TsovWdmSpec};
use linkbench::elec_energy::{self, ElectricalLinkParams};
use linkbench::fom::{self, TechnologyEntry};
use linkbench::opt_link::{self, OpticalLinkParams};
use linkbench::rx_model::{self, NoiseTerms, RxNoiseParams};
use linkbench::scenario::Scenario;
use linkbench::sweep::{self, Axis, SweepKind, SweepSpec};
use linkbench::tline::{self, CpwGeometry};

fn geometry() -> impl Strategy<Value = CpwGeometry> {
    (0.5f64..50.0, 0.5f64..50.0, 0.2f64..5.0, 1e6f64..1e8, 1.0f64..12.0, 0.0f64..0.05).prop_map(
        |(w, s, t, sigma, er, tand)| CpwGeometry {
            line_width_um: w,
            gap_to_ground_um: s,
            metal_thickness_um: t,
            metal_conductivity_s_per_m: sigma,
            dielectric_eps_r: er,
            dielectric_loss_tangent: tand,
        },
    )
}

fn entry() -> impl Strategy<Value = TechnologyEntry> {
    (1.0f64..1e4, 1.0f64..1e4, 0.01f64..20.0, 0.01f64..1e5, 0.01f64..1e3).prop_map(|(a, s, e, l, t)| {
        TechnologyEntry {
            name: "x".into(),
            areal_bw_density: a,
            shoreline_bw_density: s,
            energy_efficiency: e,
            link_length: l,
            link_latency: t,
            source_note: "estimate".into(),
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn attenuation_increases_with_frequency(g in geometry(), f in 1e7f64..5e10, r in 1.01f64..4.0) {
        let a = tline::cpw_attenuation(&g, f).unwrap();
        let b = tline::cpw_attenuation(&g, f * r).unwrap();
        prop_assert!(b > a);
    }

    #[test]
    fn attenuation_nondecreasing_in_loss_tangent(g in geometry(), f in 1e7f64..5e10, d in 0.0f64..0.05) {
        let lossier = CpwGeometry { dielectric_loss_tangent: g.dielectric_loss_tangent + d, ..g };
        prop_assert!(tline::cpw_attenuation(&lossier, f).unwrap() >= tline::cpw_attenuation(&g, f).unwrap());
    }

    #[test]
    fn impedance_depends_on_aspect_ratio_only(g in geometry(), c in 0.1f64..10.0) {
        let z = tline::cpw_char_impedance(&g).unwrap();
        let zs = tline::cpw_char_impedance(&g.scaled_laterally(c)).unwrap();
        prop_assert!((z - zs).abs() <= 1e-9 * z);
    }

    #[test]
    fn impedance_falls_with_permittivity(g in geometry(), d in 0.1f64..5.0) {
        let denser = CpwGeometry { dielectric_eps_r: g.dielectric_eps_r + d, ..g };
        prop_assert!(tline::cpw_char_impedance(&denser).unwrap() < tline::cpw_char_impedance(&g).unwrap());
    }

    #[test]
    fn vtf_is_bounded_and_decreasing(g in geometry(), l in 0.0f64..50.0, dl in 0.01f64..10.0, f in 1e7f64..5e10) {
        let h1 = tline::vtf(&g, l, f).unwrap();
        let h2 = tline::vtf(&g, l + dl, f).unwrap();
        prop_assert!(h1 <= 1.0 && h2 > 0.0 && h2 < h1);
    }

    #[test]
    fn electrical_energy_floor_and_monotone(l in 0.0f64..20.0, dl in 0.01f64..5.0) {
        let p = ElectricalLinkParams::default();
        let a = elec_energy::electrical_energy_per_bit(&p, l).unwrap();
        let b = elec_energy::electrical_energy_per_bit(&p, l + dl).unwrap();
        prop_assert!(a >= p.receiver_energy_fj);
        prop_assert!(b > a);
    }

    #[test]
    fn optical_energy_nondecreasing_in_length(l in 0.0f64..100.0, dl in 0.0f64..50.0, s in -35.0f64..-10.0) {
        let o = OpticalLinkParams::default();
        let a = opt_link::optical_energy_per_bit(&o, l, 8.0, s).unwrap();
        let b = opt_link::optical_energy_per_bit(&o, l + dl, 8.0, s).unwrap();
        prop_assert!(b >= a);
    }

    #[test]
    fn laser_budget_inverts(s in -40.0f64..-5.0, loss in 0.0f64..30.0, er in 1.0f64..15.0) {
        let o = OpticalLinkParams { extinction_ratio_db: er, ..OpticalLinkParams::default() };
        let p = opt_link::required_laser_electrical_power(s, loss, &o).unwrap();
        let back = opt_link::received_oma_dbm(p, loss, &o).unwrap();
        prop_assert!((back - o.link_margin_db - s).abs() < 1e-9);
    }

    #[test]
    fn optical_density_nondecreasing_in_ratio(p in 1.0f64..130.0, r in 0.0f64..0.5, dr in 0.0f64..0.5, n in 1u32..64) {
        let t = TsovWdmSpec { tsov_ratio: r, n_wdm: n, channel_datarate_gbps: 32.0 };
        let t2 = TsovWdmSpec { tsov_ratio: r + dr, ..t };
        prop_assert!(
            bw_density::optical_bw_density(p, &t2).gbyte_s_per_mm2
                >= bw_density::optical_bw_density(p, &t).gbyte_s_per_mm2
        );
    }

    #[test]
    fn realizable_never_exceeds_theoretical(p in 1.0f64..130.0, dr in 1.0f64..64.0, oh in 0.0f64..0.99, hex in any::<bool>()) {
        let pattern = if hex { BumpPattern::Hex } else { BumpPattern::Square };
        let spec = BumpArraySpec { bump_pitch_um: p, pattern, die_edge_mm: 1.0, channel_datarate_gbps: dr, overhead_total: oh };
        let bound = bw_density::theoretical_bw_density(&spec).gbyte_s_per_mm2() * pattern.efficiency();
        prop_assert!(bw_density::realizable_bw_density(&spec) <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn profile_covers_its_domain(p in 1.0f64..=130.0) {
        let t = PitchProfileTable::default();
        prop_assert!(bw_density::realizable_bw_density_at(&t, p).unwrap() > 0.0);
    }

    #[test]
    fn zeroing_a_noise_source_never_hurts(c in 0.08f64..100.0, which in 0usize..4) {
        let full = RxNoiseParams::default();
        let mut terms = NoiseTerms::default();
        match which {
            0 => terms.shot = false,
            1 => terms.rin = false,
            2 => terms.dark = false,
            _ => terms.tia = false,
        }
        let reduced = RxNoiseParams { terms, ..full };
        let a = rx_model::oma_sensitivity(c, &full).unwrap();
        let b = rx_model::oma_sensitivity(c, &reduced).unwrap();
        prop_assert!(b <= a + 1e-9);
    }

    #[test]
    fn sensitivity_is_self_consistent(c in 0.08f64..100.0) {
        let p = RxNoiseParams::default();
        let s = rx_model::solve_sensitivity(c, &p).unwrap();
        let q = p.responsivity_a_per_w * s.oma_w / rx_model::noise_breakdown(&p, c, s.oma_w).total().sqrt();
        prop_assert!((q - rx_model::q_from_ber(p.target_ber).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn fom_monotone_in_each_field(e in entry(), f in 1.01f64..10.0) {
        let base = fom::compute_fom(&e).unwrap();
        let up = |e: TechnologyEntry| fom::compute_fom(&e).unwrap();
        let wider = up(TechnologyEntry { areal_bw_density: e.areal_bw_density * f, ..e.clone() });
        let longer = up(TechnologyEntry { link_length: e.link_length * f, ..e.clone() });
        let hungrier = up(TechnologyEntry { energy_efficiency: e.energy_efficiency * f, ..e.clone() });
        let slower = up(TechnologyEntry { link_latency: e.link_latency * f, ..e.clone() });
        prop_assert!(wider > base && longer > base);
        prop_assert!(hungrier < base && slower < base);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sweep_order_independent(pitches in proptest::collection::vec(1.0f64..130.0, 1..12).prop_shuffle()) {
        let sc = Scenario::builtin();
        let run = |values: Vec<f64>| {
            let axis = Axis::List { name: "pitch_um".into(), values };
            let t = sweep::run_sweep(&SweepSpec::new(SweepKind::BwDensityVsPitch, Some(axis)), &sc).unwrap();
            let mut csv: Vec<String> = t.to_csv().unwrap().lines().skip(2).map(String::from).collect();
            csv.sort();
            csv
        };
        let mut sorted = pitches.clone();
        sorted.sort_by(f64::total_cmp);
        prop_assert_eq!(run(pitches), run(sorted));
    }

    #[test]
    fn costlier_optics_never_shorten_partition(extra in 0.0f64..200.0) {
        let sc = Scenario::builtin();
        let s = sc.link_sensitivity_dbm().unwrap();
        let solve = |o: &OpticalLinkParams| {
            opt_link::partition_length(&sc.electrical, o, s, &[], &sc.partition).unwrap().length_mm().unwrap()
        };
        let pricier = OpticalLinkParams { mod_driver_energy_fj: sc.optical.mod_driver_energy_fj + extra, ..sc.optical };
        prop_assert!(solve(&pricier) >= solve(&sc.optical) - sc.partition.tolerance_mm);
    }
}
