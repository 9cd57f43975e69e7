//! Independent oracles shared by the integration and acceptance tests. Nothing
//! here calls into the library's numerics.

#![allow(dead_code)]

use num_complex::Complex64;

pub const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
pub const C6: f64 = TWO_PI * 137_000.0;

/// Dense `H = (Ω/2) Σ σˣ − Σ δ_i n_i + Σ_{i<j} C6/r⁶ n_i n_j` built from positions.
pub fn dense_hamiltonian(positions: &[[f64; 2]], omega: f64, detunings: &[f64]) -> Vec<Vec<Complex64>> {
    let n = positions.len();
    let dim = 1usize << n;
    let mut h = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (s, row) in h.iter_mut().enumerate() {
        let occ = |q: usize| (s >> q) & 1 == 1;
        let mut e = 0.0;
        for i in 0..n {
            if occ(i) {
                e -= detunings[i];
                for j in (i + 1)..n {
                    if occ(j) {
                        let dx = positions[i][0] - positions[j][0];
                        let dy = positions[i][1] - positions[j][1];
                        e += C6 / (dx * dx + dy * dy).powi(3);
                    }
                }
            }
        }
        row[s] = Complex64::new(e, 0.0);
        for q in 0..n {
            row[s ^ (1 << q)] += Complex64::new(omega / 2.0, 0.0);
        }
    }
    h
}

fn derivative(h: &[Vec<Complex64>], psi: &[Complex64]) -> Vec<Complex64> {
    let minus_i = Complex64::new(0.0, -1.0);
    h.iter()
        .map(|row| minus_i * row.iter().zip(psi).map(|(a, b)| a * b).sum::<Complex64>())
        .collect()
}

fn axpy(y: &[Complex64], terms: &[(f64, &[Complex64])], dt: f64) -> Vec<Complex64> {
    (0..y.len())
        .map(|i| y[i] + terms.iter().map(|(c, k)| k[i] * (c * dt)).sum::<Complex64>())
        .collect()
}

/// Adaptive Dormand–Prince 5(4) integration of `i dψ/dt = H ψ` over `t`.
pub fn dopri45(h: &[Vec<Complex64>], psi0: &[Complex64], t: f64, rtol: f64, atol: f64) -> Vec<Complex64> {
    const A21: f64 = 1.0 / 5.0;
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
    const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
    const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
    const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
    const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
    let mut y = psi0.to_vec();
    if t <= 0.0 {
        return y;
    }
    let mut elapsed = 0.0;
    let mut dt = (t / 100.0).min(1e-3);
    let mut k1 = derivative(h, &y);
    while elapsed < t {
        dt = dt.min(t - elapsed);
        let k2 = derivative(h, &axpy(&y, &[(A21, &k1)], dt));
        let k3 = derivative(h, &axpy(&y, &[(A3[0], &k1), (A3[1], &k2)], dt));
        let k4 = derivative(h, &axpy(&y, &[(A4[0], &k1), (A4[1], &k2), (A4[2], &k3)], dt));
        let k5 = derivative(h, &axpy(&y, &[(A5[0], &k1), (A5[1], &k2), (A5[2], &k3), (A5[3], &k4)], dt));
        let k6 = derivative(
            h,
            &axpy(&y, &[(A6[0], &k1), (A6[1], &k2), (A6[2], &k3), (A6[3], &k4), (A6[4], &k5)], dt),
        );
        let y5 = axpy(&y, &[(B[0], &k1), (B[2], &k3), (B[3], &k4), (B[4], &k5), (B[5], &k6)], dt);
        let k7 = derivative(h, &y5);
        let err = axpy(
            &vec![Complex64::new(0.0, 0.0); y.len()],
            &[(E[0], &k1), (E[2], &k3), (E[3], &k4), (E[4], &k5), (E[5], &k6), (E[6], &k7)],
            dt,
        );
        let norm = (err
            .iter()
            .zip(y.iter().zip(&y5))
            .map(|(e, (a, b))| {
                let scale = atol + rtol * a.norm().max(b.norm());
                (e.norm() / scale).powi(2)
            })
            .sum::<f64>()
            / y.len() as f64)
            .sqrt();
        if norm <= 1.0 {
            elapsed += dt;
            y = y5;
            k1 = k7;
        }
        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        dt *= factor;
    }
    y
}

/// Runs `(is_mixing, duration)` segments from `|0…0⟩` with the ODE integrator.
pub fn ode_protocol(positions: &[[f64; 2]], omega: f64, delta: f64, segments: &[(bool, f64)]) -> Vec<Complex64> {
    let n = positions.len();
    let mixing = dense_hamiltonian(positions, omega, &vec![0.0; n]);
    let cost = dense_hamiltonian(positions, 0.0, &vec![delta; n]);
    let mut psi = vec![Complex64::new(0.0, 0.0); 1 << n];
    psi[0] = Complex64::new(1.0, 0.0);
    for &(is_mixing, t) in segments {
        psi = dopri45(if is_mixing { &mixing } else { &cost }, &psi, t, 1e-11, 1e-13);
    }
    psi
}

/// `−Σ z_i + c Σ_{(i,j)∈E} z_i z_j` with bits taken from `index`.
pub fn naive_cost(index: usize, n: usize, edges: &[(usize, usize)], c: f64) -> f64 {
    let bit = |q: usize| ((index >> q) & 1) as f64;
    -(0..n).map(bit).sum::<f64>() + c * edges.iter().map(|&(i, j)| bit(i) * bit(j)).sum::<f64>()
}

/// Every index minimizing [`naive_cost`], in increasing order.
pub fn naive_argmin(n: usize, edges: &[(usize, usize)], c: f64) -> (f64, Vec<usize>) {
    let costs: Vec<f64> = (0..1usize << n).map(|s| naive_cost(s, n, edges, c)).collect();
    let best = costs.iter().copied().fold(f64::INFINITY, f64::min);
    (best, (0..costs.len()).filter(|&s| costs[s] == best).collect())
}

/// Unit-disk edges: pairs closer than `radius`.
pub fn unit_disk_edges(positions: &[[f64; 2]], radius: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 0..positions.len() {
        for j in (i + 1)..positions.len() {
            let d = ((positions[i][0] - positions[j][0]).powi(2) + (positions[i][1] - positions[j][1]).powi(2)).sqrt();
            if d < radius {
                edges.push((i, j));
            }
        }
    }
    edges
}
