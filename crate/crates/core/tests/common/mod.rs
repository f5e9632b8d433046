//! Helpers shared by the integration test targets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twinwl::mlp::{mlp_backward, mlp_loss, DenseMatrix, MlpParams};

fn random_instance(rng: &mut ChaCha8Rng) -> (MlpParams, DenseMatrix, Vec<usize>) {
    let input = rng.gen_range(1..=5);
    let hidden = rng.gen_range(1..=6);
    let classes = rng.gen_range(2..=4);
    let rows = rng.gen_range(1..=6);
    let mut p = MlpParams::new_random(input, hidden, classes, rng);
    // Push biases away from zero so few hidden units sit on the ReLU kink.
    for b in p.b1.iter_mut() {
        *b += rng.gen_range(-0.5..0.5);
    }
    let data = (0..rows * input)
        .map(|_| rng.gen_range(-2.0..2.0))
        .collect();
    let x = DenseMatrix::from_vec(rows, input, data).unwrap();
    let labels = (0..rows).map(|_| rng.gen_range(0..classes)).collect();
    (p, x, labels)
}

/// Smallest `|W1 x + b1|` margin to the ReLU kink over all rows and units.
fn min_preactivation(p: &MlpParams, x: &DenseMatrix) -> f64 {
    let mut min = f64::INFINITY;
    for r in 0..x.rows() {
        let h = p.w1.matvec(x.row(r));
        for (z, b) in h.iter().zip(&p.b1) {
            min = min.min((z + b).abs());
        }
    }
    min
}

/// Compares analytic gradients against central differences (step 1e-5) on
/// `instances` random small problems. Returns the worst relative error.
pub fn gradient_check(instances: usize, seed: u64) -> f64 {
    const STEP: f64 = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    while checked < instances {
        let (p, x, labels) = random_instance(&mut rng);
        // A finite difference straddling the kink measures a one-sided slope.
        if min_preactivation(&p, &x) < 1e-3 {
            continue;
        }
        let (grad, loss) = mlp_backward(&p, &x, &labels).unwrap();
        assert!((loss - mlp_loss(&p, &x, &labels).unwrap()).abs() < 1e-12);
        let analytic: Vec<f64> = grad
            .slices()
            .iter()
            .flat_map(|s| s.iter().copied())
            .collect();
        let mut k = 0;
        for block in 0..4 {
            for i in 0..p.slices()[block].len() {
                let mut plus = p.clone();
                plus.slices_mut()[block][i] += STEP;
                let mut minus = p.clone();
                minus.slices_mut()[block][i] -= STEP;
                let numeric = (mlp_loss(&plus, &x, &labels).unwrap()
                    - mlp_loss(&minus, &x, &labels).unwrap())
                    / (2.0 * STEP);
                let a = analytic[k];
                k += 1;
                let scale = a.abs().max(numeric.abs());
                // Coordinates that vanish up to rounding have no relative error.
                if scale < 1e-7 {
                    assert!(
                        (a - numeric).abs() < 1e-9,
                        "analytic {a}, numeric {numeric}"
                    );
                    continue;
                }
                worst = worst.max((a - numeric).abs() / scale);
            }
        }
        checked += 1;
    }
    worst
}
