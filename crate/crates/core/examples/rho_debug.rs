use dlog_core::analysis::dickman_rho;

// Independent oracle: RK4 on y(u) = ln rho(u), y' = -exp(y(u-1) - y(u))/u,
// dense delayed values via cubic Hermite from the stored fine grid.
fn rho_rk4(umax: usize, inv: usize) -> Vec<f64> {
    let h = 1.0 / inv as f64;
    let n = umax * inv;
    let mut y = vec![0.0f64; n + 1]; // ln rho; [0, 1] -> 0... index = u*inv
    let yd = |y: &Vec<f64>, x: f64| -> f64 {
        // delayed ln rho at x (x <= current frontier - 1 + h guaranteed)
        if x <= 1.0 { return 0.0; }
        let fx = x * inv as f64;
        let j = fx.floor() as usize;
        let t = fx - j as f64;
        if t == 0.0 { return y[j]; }
        // cubic Lagrange on 4 points around j
        let j0 = j.saturating_sub(1);
        let mut v = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for m in 0..4 {
                if m != i { w *= (t + 1.0 - m as f64) / (i as f64 - m as f64); }
            }
            v += w * y[j0 + i];
        }
        v
    };
    for j in inv..n {
        let u = j as f64 * h;
        let f = |y_vec: &Vec<f64>, uu: f64, yy: f64| -> f64 {
            -( (yd(y_vec, uu - 1.0) - yy).exp() ) / uu
        };
        let k1 = f(&y, u, y[j]);
        let k2 = f(&y, u + 0.5*h, y[j] + 0.5*h*k1);
        let k3 = f(&y, u + 0.5*h, y[j] + 0.5*h*k2);
        let k4 = f(&y, u + h, y[j] + h*k3);
        y[j+1] = y[j] + h/6.0*(k1 + 2.0*k2 + 2.0*k3 + k4);
    }
    (0..=umax).map(|k| y[k * inv]).collect()
}

fn main() {
    let a = rho_rk4(21, 2048);
    let b = rho_rk4(21, 4096);
    for u in [2usize, 5, 10, 20] {
        let ra = a[u].exp();
        let rb = b[u].exp();
        let mine = dickman_rho(u as f64).unwrap();
        println!("u={u}: rk4_2048={ra:.10e} rk4_4096={rb:.10e} table={mine:.10e}");
        println!("   rk4 self-consistency: {:.2e}; table vs rk4: {:+.2e}", ((ra-rb)/rb).abs(), (mine-rb)/rb);
    }
}
