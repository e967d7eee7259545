use std::f64::consts::PI;
use std::sync::Arc;

use kfrac::problem_model::{
    check_h2, estimate_b0_constant, memory_coupling_matrix, KirchhoffLaw, MemoryKernel, MemorySpec,
};
use kfrac::spatial_operator::{assemble_fem_integral, build_spectral, Domain1D};

#[test]
fn h2_margins_match_hand_arithmetic() {
    let constant = check_h2(&KirchhoffLaw::constant(1.0).unwrap(), 10.0, 5.0).unwrap();
    assert_eq!((constant.margin, constant.pass), (1.0, true));
    let mild = check_h2(&KirchhoffLaw::affine(1.0, 0.1).unwrap(), 0.25, 0.75).unwrap();
    assert_eq!(mild.k, 1.0);
    assert!((mild.margin - 0.6).abs() < 1e-15 && mild.pass);
    let steep = check_h2(&KirchhoffLaw::saturating(1.0, 1.0).unwrap(), 1.0, 0.0).unwrap();
    assert_eq!((steep.margin, steep.pass), (-3.0, false));
}

#[test]
fn linear_weight_coupling_entry_matches_closed_form() {
    let op = build_spectral(Domain1D::new(0.0, 1.0).unwrap(), 0.5, 4).unwrap();
    let mem = MemorySpec {
        beta: 0.0,
        s_memory: None,
        b0: MemoryKernel::Separable {
            g: Arc::new(|_, _| 1.0),
            h: Arc::new(|x| x),
        },
    };
    let g = memory_coupling_matrix(&mem, &op, 0.0, 0.0).unwrap();
    // ∫_0^1 x (cos πx - cos 3πx) dx = -2/π² + 2/(9π²)
    let expect = -16.0 / (9.0 * PI * PI);
    assert!((g[(0, 1)] - expect).abs() < 1e-13, "{} vs {expect}", g[(0, 1)]);
    assert!((g[(0, 0)] - 0.5).abs() < 1e-13);
}

#[test]
fn fem_basis_is_orthonormal_under_unit_weight() {
    let op = assemble_fem_integral(Domain1D::new(-1.0, 1.0).unwrap(), 0.5, 12).unwrap();
    let mem = MemorySpec {
        beta: 0.0,
        s_memory: None,
        b0: MemoryKernel::General(Arc::new(|_, _, _| 1.0)),
    };
    let g = memory_coupling_matrix(&mem, &op, 0.3, 0.1).unwrap();
    let n = op.mode_count();
    assert!((g - nalgebra::DMatrix::<f64>::identity(n, n)).abs().max() < 1e-12);
    let b0 = estimate_b0_constant(&mem, &op, 1.0).unwrap();
    assert!((b0 - 1.0 / op.eigenvalues()[0]).abs() < 1e-10);
}
