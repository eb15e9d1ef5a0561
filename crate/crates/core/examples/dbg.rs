use kirchfrac::fracops::{FracParams, hilfer_deriv_left};
use kirchfrac::grid::Grid1D;
use kirchfrac::psi::PsiMap;

fn main() {
    let g = Grid1D::uniform(1.0, 64).unwrap();
    let psi = PsiMap::identity();
    // Left derivative of f(x) = x(1-x), alpha -> 1: expect 1-2x
    for beta in [0.0, 0.3, 1.0] {
        let p = FracParams::new(0.999, beta, 2.0).unwrap();
        let f: Vec<f64> = g.nodes().iter().map(|&x| x * (1.0 - x)).collect();
        let d = hilfer_deriv_left(&f, &p, &psi, &g).unwrap();
        let mut worst = (0.0f64, 0.0f64, 0.0f64);
        for (i, &x) in g.nodes().iter().enumerate() {
            let err = (d[i] - (1.0 - 2.0 * x)).abs();
            if err > worst.0 { worst = (err, x, d[i]); }
        }
        println!("beta={beta}: worst err {:.4e} at x={:.4} (got {:.6}, want {:.6})", worst.0, worst.1, worst.2, 1.0-2.0*worst.1);
        // print first few and last few values
        for i in [0usize,1,2,3,62,63,64,65] {
            let x = g.nodes()[i];
            println!("   x={:.5} d={:.6} want={:.6}", x, d[i], 1.0-2.0*x);
        }
    }
}
