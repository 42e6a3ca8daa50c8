use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rqi_qrf::relational::*;
use rqi_qrf::{CPMap, FrameKind, FrameState, GroupElement, HaarGrid, RepSpace, C64};

fn maxabs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn random_density(d: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let a = DMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let r = &a * a.adjoint();
    let t = r.trace();
    r / t
}

fn plus() -> DMatrix<C64> {
    DMatrix::from_element(2, 2, C64::new(0.5, 0.0))
}

fn random_su2(rng: &mut ChaCha8Rng) -> GroupElement {
    GroupElement::su2_euler(
        rng.random_range(0.0..std::f64::consts::TAU),
        rng.random_range(-1.0f64..1.0).acos(),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}

#[test]
fn fock_projector_is_twirl_invariant() {
    let rep = RepSpace::u1_fock(5);
    let mut rho = DMatrix::zeros(6, 6);
    rho[(3, 3)] = C64::new(1.0, 0.0);
    assert_eq!(g_twirl(&rho, &rep, 16).unwrap(), rho);
}

#[test]
fn phase_eigenstate_twirls_to_maximally_mixed() {
    for s in [1usize, 4, 9] {
        let f = FrameState::new(FrameKind::U1PhaseEigenstate { s }, GroupElement::u1(1.2)).unwrap();
        let tw = g_twirl(&f.density(), &f.rep(), 16).unwrap();
        let expect = DMatrix::<C64>::identity(s + 1, s + 1) / C64::from((s + 1) as f64);
        assert!(maxabs(&(tw - expect)) < 1e-15);
    }
}

#[test]
fn two_mode_twirl_keeps_intra_sector_coherence() {
    let rep = RepSpace::product(RepSpace::u1_fock(3), RepSpace::u1_fock(2));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let v = DVector::from_fn(12, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .normalize();
    let rho = &v * v.adjoint();
    let exact = g_twirl(&rho, &rep, 0).unwrap();
    let quad = twirl_on_grid(&rho, &rep, &HaarGrid::u1(11)).unwrap();
    assert!(maxabs(&(&exact - &quad)) < 1e-14);
    // |1,0⟩ and |0,1⟩ share total photon number 1
    assert!(exact[(3, 1)].norm() > 1e-3);
    assert_eq!(exact[(3, 0)].norm(), 0.0);
}

#[test]
fn twirl_rejects_non_states() {
    let rep = RepSpace::u1_fock(1);
    let bad = DMatrix::from_element(2, 2, C64::new(1.0, 0.0));
    assert!(matches!(
        g_twirl(&bad, &rep, 4),
        Err(rqi_qrf::QrfError::NotDensityMatrix(_))
    ));
}

#[test]
fn su2_grids_agree() {
    let rep = RepSpace::product(RepSpace::spin_half(), RepSpace::su2_irrep(2));
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let rho = random_density(6, &mut rng);
    let euler = twirl_on_grid(&rho, &rep, &HaarGrid::su2_euler(4)).unwrap();
    let polar = twirl_on_grid(&rho, &rep, &HaarGrid::su2_polar(24)).unwrap();
    assert!(maxabs(&(euler - polar)) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn twirl_is_idempotent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u1 = RepSpace::product(RepSpace::u1_qubit(), RepSpace::u1_fock(3));
        let rho = random_density(8, &mut rng);
        let once = g_twirl(&rho, &u1, 0).unwrap();
        let twice = g_twirl(&once, &u1, 0).unwrap();
        prop_assert!(maxabs(&(&twice - &once)) < 1e-10);

        let su2 = RepSpace::product(RepSpace::spin_half(), RepSpace::su2_regular(1));
        let rho = random_density(20, &mut rng);
        let once = g_twirl(&rho, &su2, 4).unwrap();
        let twice = g_twirl(&once, &su2, 4).unwrap();
        prop_assert!(maxabs(&(&twice - &once)) < 1e-10);
    }

    #[test]
    fn frame_states_are_covariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (g, h) = (GroupElement::u1(rng.random_range(0.0..7.0)), GroupElement::u1(rng.random_range(0.0..7.0)));
        for kind in [FrameKind::U1PhaseEigenstate { s: 6 }, FrameKind::U1Coherent { amplitude: 1.7 }] {
            let lhs = kind.rep().unitary(&h).unwrap() * FrameState::new(kind, g).unwrap().vector;
            let rhs = FrameState::new(kind, h.compose(&g).unwrap()).unwrap().vector;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
        let (g, h) = (random_su2(&mut rng), random_su2(&mut rng));
        for kind in [FrameKind::Su2Fiducial { s: 2 }, FrameKind::Su2Coherent { two_j: 5 }] {
            let lhs = kind.rep().unitary(&h).unwrap() * FrameState::new(kind, g).unwrap().vector;
            let rhs = FrameState::new(kind, h.compose(&g).unwrap()).unwrap().vector;
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn decoherence_maps_are_cptp(s in 1usize..10, amp in 0.3f64..2.5, two_j in 1u32..6) {
        let maps = [
            decoherence_map_a(&FrameKind::U1PhaseEigenstate { s }, &RepSpace::u1_qubit(), 32).unwrap(),
            decoherence_map_a(&FrameKind::U1Coherent { amplitude: amp }, &RepSpace::u1_fock(2), 64).unwrap(),
            decoherence_map_a(&FrameKind::Su2Coherent { two_j }, &RepSpace::spin_half(), 8).unwrap(),
            rqi_qrf::overlap::su2_cs_decoherence(two_j, 16),
        ];
        for m in &maps {
            prop_assert!(m.trace_residual() < 1e-10);
            prop_assert!(m.min_choi_eigenvalue() > -1e-10);
        }
    }
}

#[test]
fn encoding_is_invariant_and_normalised() {
    let frame =
        FrameState::new(FrameKind::U1PhaseEigenstate { s: 4 }, GroupElement::u1(0.8)).unwrap();
    let sys = RepSpace::u1_qubit();
    let sigma = encode(&plus(), &sys, &frame, 0).unwrap();
    assert!((sigma.trace().re - 1.0).abs() < 1e-12);
    let joint = RepSpace::product(sys, frame.rep());
    for k in 0..12 {
        let u = joint.unitary(&GroupElement::u1(0.37 * k as f64)).unwrap();
        assert!(maxabs(&(&u * &sigma * u.adjoint() - &sigma)) < 1e-10);
    }
}

#[test]
fn recover_after_encode_is_the_noise_integral() {
    let sys = RepSpace::u1_qubit();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = random_density(2, &mut rng);
    let frame = FrameState::new(
        FrameKind::U1PhaseEigenstate { s: 4 },
        GroupElement::identity(rqi_qrf::Group::U1),
    )
    .unwrap();
    let sigma = encode(&rho, &sys, &frame, 0).unwrap();
    let back = recover(&sigma, &sys, &frame.kind, 32).unwrap();
    let noise = decoherence_map_a(&frame.kind, &sys, 32)
        .unwrap()
        .apply(&rho);
    assert!(maxabs(&(&back - &noise)) < 1e-12);
    assert!((back.trace().re - 1.0).abs() < 1e-10);
}

#[test]
fn recovery_converges_with_frame_size() {
    let sys = RepSpace::u1_qubit();
    let mut last = f64::INFINITY;
    for s in [2usize, 8, 32, 128] {
        let frame = FrameState::identity(FrameKind::U1PhaseEigenstate { s });
        let sigma = encode(&plus(), &sys, &frame, 0).unwrap();
        let back = recover(&sigma, &sys, &frame.kind, 2 * s + 8).unwrap();
        let err = maxabs(&(back - plus()));
        assert!(err < last);
        last = err;
    }
    assert!(last < 5e-3);
}

#[test]
fn recover_rejects_non_invariant_input() {
    let sys = RepSpace::u1_qubit();
    let frame = FrameState::identity(FrameKind::U1PhaseEigenstate { s: 2 });
    let raw = plus().kronecker(&frame.density());
    assert!(matches!(
        recover(&raw, &sys, &frame.kind, 16),
        Err(rqi_qrf::QrfError::NotInvariant(_))
    ));
}

#[test]
fn phase_eigenstate_kernel_is_the_fejer_overlap() {
    let kind = FrameKind::U1PhaseEigenstate { s: 5 };
    for k in 0..20 {
        let g = 0.31 * k as f64;
        let kern = decoherence_kernel(&kind, &GroupElement::u1(g)).unwrap();
        assert!((kern - 6.0 * rqi_qrf::overlap::u1_overlap(5, g)).abs() < 1e-12);
    }
}

#[test]
fn plus_survival_is_the_first_fourier_coefficient() {
    // oracle: (1/(s+1)) Σ_{|n|≤s} (s+1-|n|) δ_{n,1} = s/(s+1)
    let sys = RepSpace::u1_qubit();
    let mut last = 0.0;
    for s in [2usize, 4, 8, 16, 32, 64] {
        let f = decoherence_map_a(&FrameKind::U1PhaseEigenstate { s }, &sys, 2 * s + 4).unwrap();
        let out = f.apply(&plus());
        let survival = (out[(0, 1)] / plus()[(0, 1)]).re;
        assert!((survival - s as f64 / (s as f64 + 1.0)).abs() < 1e-12);
        assert!(survival > last);
        last = survival;
    }
}

#[test]
fn invariant_system_states_pass_through_decoherence() {
    let sys = RepSpace::u1_fock(3);
    let mut rho = DMatrix::zeros(4, 4);
    rho[(0, 0)] = C64::new(0.25, 0.0);
    rho[(2, 2)] = C64::new(0.75, 0.0);
    let f = decoherence_map_a(&FrameKind::U1Coherent { amplitude: 1.1 }, &sys, 64).unwrap();
    assert!(maxabs(&(f.apply(&rho) - &rho)) < 1e-14);
}

// ---- relational instrument

#[test]
fn povm_completeness_at_2048() {
    for (sa, sb) in [(3usize, 3usize), (2, 8)] {
        let r = povm_completeness_residual(
            &FrameKind::U1PhaseEigenstate { s: sa },
            &FrameKind::U1PhaseEigenstate { s: sb },
            2048,
        )
        .unwrap();
        assert!(r < 1e-6, "{r}");
    }
}

#[test]
fn su2_povm_completeness() {
    let r = povm_completeness_residual(
        &FrameKind::Su2Coherent { two_j: 1 },
        &FrameKind::Su2Coherent { two_j: 2 },
        6,
    )
    .unwrap();
    assert!(r < 1e-10, "{r}");
}

#[test]
fn coherent_projectors_are_rejected() {
    let r = relational_effect(
        &FrameKind::U1Coherent { amplitude: 1.0 },
        &FrameKind::U1PhaseEigenstate { s: 2 },
        &GroupElement::u1(0.0),
        16,
    );
    assert!(matches!(r, Err(rqi_qrf::QrfError::NonMLProjectors(_))));
}

#[test]
fn instrument_is_group_invariant() {
    let (ka, kb) = (
        FrameKind::U1PhaseEigenstate { s: 2 },
        FrameKind::U1PhaseEigenstate { s: 3 },
    );
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sigma = random_density(24, &mut rng);
    let rep = RepSpace::product(
        RepSpace::u1_qubit(),
        RepSpace::product(RepSpace::u1_fock(2), RepSpace::u1_fock(3)),
    );
    let h = GroupElement::u1(1.9);
    let u = rep.unitary(&GroupElement::u1(0.37)).unwrap();
    let lhs = relational_instrument(&(&u * &sigma * u.adjoint()), 2, &ka, &kb, &h, 64).unwrap();
    let rhs = &u * relational_instrument(&sigma, 2, &ka, &kb, &h, 64).unwrap() * u.adjoint();
    assert!(maxabs(&(lhs - rhs)) < 1e-12);
}

#[test]
fn product_states_give_unit_outcome_density() {
    let sys = RepSpace::u1_qubit();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..5 {
        let rho = random_density(2, &mut rng);
        let rho_b = random_density(4, &mut rng);
        let a = FrameState::new(
            FrameKind::U1PhaseEigenstate { s: 3 },
            GroupElement::u1(rng.random_range(0.0..6.2)),
        )
        .unwrap();
        let h = GroupElement::u1(rng.random_range(0.0..6.2));
        let fc = brute_force_change_frame(
            &rho,
            &sys,
            &a,
            &rho_b,
            &FrameKind::U1PhaseEigenstate { s: 3 },
            &h,
            64,
        )
        .unwrap();
        assert!((fc.probability - 1.0).abs() < 1e-8, "{}", fc.probability);
    }
}

#[test]
fn factored_frame_change_matches_brute_force() {
    let sys = RepSpace::u1_qubit();
    let kb = FrameKind::U1PhaseEigenstate { s: 3 };
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for _ in 0..5 {
        let rho = random_density(2, &mut rng);
        let rho_b = random_density(4, &mut rng);
        let a = FrameState::new(
            FrameKind::U1PhaseEigenstate { s: 3 },
            GroupElement::u1(rng.random_range(0.0..6.2)),
        )
        .unwrap();
        let h = GroupElement::u1(rng.random_range(0.0..6.2));
        let brute = brute_force_change_frame(&rho, &sys, &a, &rho_b, &kb, &h, 64).unwrap();
        let fact = change_frame(&rho, &sys, &a, &kb, &h, 64).unwrap();
        assert!(maxabs(&(&brute.state - &fact)) < 1e-8);
        // G-invariant output
        let joint = RepSpace::product(sys.clone(), kb.rep());
        assert!(maxabs(&(g_twirl(&fact, &joint, 0).unwrap() - &fact)) < 1e-8);
    }
}

#[test]
fn coherent_frame_change_matches_brute_force() {
    let sys = RepSpace::u1_qubit();
    let kb = FrameKind::U1Coherent { amplitude: 0.9 };
    let a = FrameState::new(
        FrameKind::U1Coherent { amplitude: 1.2 },
        GroupElement::u1(2.2),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rho = random_density(2, &mut rng);
    let rho_b = random_density(kb.dim(), &mut rng);
    let h = GroupElement::u1(0.6);
    let brute = brute_force_change_frame(&rho, &sys, &a, &rho_b, &kb, &h, 96).unwrap();
    let fact = change_frame(&rho, &sys, &a, &kb, &h, 96).unwrap();
    assert!(
        (brute.probability - 1.0).abs() < 1e-8,
        "{}",
        brute.probability
    );
    assert!(maxabs(&(&brute.state - &fact)) < 1e-8);
}

#[test]
fn su2_frame_change_matches_brute_force() {
    let sys = RepSpace::spin_half();
    let kb = FrameKind::Su2Coherent { two_j: 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let a = FrameState::new(FrameKind::Su2Coherent { two_j: 1 }, random_su2(&mut rng)).unwrap();
    let rho = random_density(2, &mut rng);
    let rho_b = random_density(3, &mut rng);
    let h = random_su2(&mut rng);
    let brute = brute_force_change_frame(&rho, &sys, &a, &rho_b, &kb, &h, 8).unwrap();
    let fact = change_frame(&rho, &sys, &a, &kb, &h, 8).unwrap();
    assert!(
        (brute.probability - 1.0).abs() < 1e-8,
        "{}",
        brute.probability
    );
    assert!(maxabs(&(&brute.state - &fact)) < 1e-8);
}

#[test]
fn large_frames_approach_noiseless_encoding() {
    let sys = RepSpace::u1_qubit();
    let kb = FrameKind::U1PhaseEigenstate { s: 2 };
    let h = GroupElement::u1(0.4);
    let a = GroupElement::u1(1.3);
    let ua = sys.unitary(&a.inverse()).unwrap();
    let target_s = &ua * plus() * ua.adjoint();
    let hb = FrameState::new(kb, h).unwrap();
    let target = g_twirl(
        &target_s.kronecker(&hb.density()),
        &RepSpace::product(sys.clone(), kb.rep()),
        0,
    )
    .unwrap();
    let mut last = f64::INFINITY;
    for s in [4usize, 16, 64, 256] {
        let fa = FrameState::new(FrameKind::U1PhaseEigenstate { s }, a).unwrap();
        let err =
            maxabs(&(change_frame(&plus(), &sys, &fa, &kb, &h, 2 * s + 8).unwrap() - &target));
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-3);
}

#[test]
fn net_decoherence_is_recovery_after_frame_change() {
    let sys = RepSpace::u1_qubit();
    let kb = FrameKind::U1PhaseEigenstate { s: 3 };
    let a = FrameState::new(FrameKind::U1PhaseEigenstate { s: 4 }, GroupElement::u1(0.9)).unwrap();
    let h = GroupElement::u1(2.6);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let net = net_decoherence(&a, &kb, &sys, &h, 64).unwrap();
    assert!(net.trace_residual() < 1e-10);
    for _ in 0..4 {
        let rho = random_density(2, &mut rng);
        let cf = change_frame(&rho, &sys, &a, &kb, &h, 64).unwrap();
        let back = recover(&cf, &sys, &kb, 64).unwrap();
        assert!(maxabs(&(back - net.apply(&rho))) < 1e-8);
    }
}

#[test]
fn large_frames_make_net_map_a_rotation() {
    let sys = RepSpace::u1_qubit();
    let (a, h) = (GroupElement::u1(0.7), GroupElement::u1(2.1));
    let rot = CPMap::unitary(&sys.unitary(&h.compose(&a).unwrap().inverse()).unwrap());
    let mut last = f64::INFINITY;
    for s in [4usize, 32, 256] {
        let fa = FrameState::new(FrameKind::U1PhaseEigenstate { s }, a).unwrap();
        let net = net_decoherence(
            &fa,
            &FrameKind::U1PhaseEigenstate { s },
            &sys,
            &h,
            2 * s + 8,
        )
        .unwrap();
        let d = net.distance(&rot);
        assert!(d < last);
        last = d;
    }
    assert!(last < 1e-2);
}

#[test]
fn su2_coherent_noise_does_not_commute_with_rotations() {
    let sys = RepSpace::spin_half();
    let n = 12;
    let f = decoherence_map_a(&FrameKind::Su2Coherent { two_j: 4 }, &sys, n).unwrap();
    let h = GroupElement::su2_euler(0.3, 1.0, -0.4);
    let u = CPMap::unitary(&sys.unitary(&h).unwrap());
    assert!(f.compose(&u).distance(&u.compose(&f)) > 1e-2);
    // the U(1) analogue commutes
    let q = RepSpace::u1_qubit();
    let f = decoherence_map_a(&FrameKind::U1PhaseEigenstate { s: 4 }, &q, 16).unwrap();
    let u = CPMap::unitary(&q.unitary(&GroupElement::u1(1.1)).unwrap());
    assert!(f.compose(&u).distance(&u.compose(&f)) < 1e-14);
}

#[test]
fn coherent_frame_map_matches_dephasing_sandwich() {
    let sys = RepSpace::spin_half();
    for two_j in [1u32, 4, 9] {
        let n = two_j as usize + 4;
        let generic = decoherence_map_a(&FrameKind::Su2Coherent { two_j }, &sys, n).unwrap();
        let closed = rqi_qrf::overlap::su2_cs_decoherence(two_j, n);
        assert!(generic.distance(&closed) < 1e-12, "2j = {two_j}");
    }
}

#[test]
fn instrument_is_repeatable_on_invariant_states() {
    // the projectors |g⟩ are not orthogonal, so a second application rescales
    // the post-measurement state without changing it
    let k = FrameKind::U1PhaseEigenstate { s: 3 };
    let rep = RepSpace::product(k.rep(), k.rep());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sigma = g_twirl(&random_density(16, &mut rng), &rep, 0).unwrap();
    let h = GroupElement::u1(0.5);
    let once = relational_instrument(&sigma, 1, &k, &k, &h, 64).unwrap();
    let twice = relational_instrument(&once, 1, &k, &k, &h, 64).unwrap();
    let ratio = twice.trace() / once.trace();
    assert!(maxabs(&(&twice - &once * ratio)) < 1e-8 * maxabs(&twice));
}
