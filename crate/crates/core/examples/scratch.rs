use guplab::grid::MomentumGrid;
use guplab::states::{squeezed_state, SqueezedParams};
use guplab::units::PhysicalUnits;
use guplab::wigner::{centered_x_grid, wigner_function_strided};

fn main() {
    let u = PhysicalUnits::default();
    for (np, stride, nx, xw) in [
        (5401usize, 25usize, 129usize, 8.0f64),
        (5401, 25, 257, 8.0),
        (5401, 25, 129, 10.0),
        (5401, 10, 129, 8.0),
        (10801, 50, 129, 8.0),
        (2701, 12, 129, 8.0),
    ] {
        let fine = MomentumGrid::symmetric(12.0, np).unwrap();
        let psi = squeezed_state(&SqueezedParams { a: 1.0, x0: 0.5, p0: -0.4 }, fine, &u).unwrap();
        let xs = centered_x_grid(0.5, xw, nx);
        let field = wigner_function_strided(&psi, &xs, stride, u.hbar).unwrap();
        println!(
            "np={np:6} stride={stride:3} nx={nx:4} xw={xw:4}: mass err {:+.3e}",
            field.total_mass() - 1.0
        );
    }
}
