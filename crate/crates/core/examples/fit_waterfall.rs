//! Fitting a Gaussian-mixture FER model to counted failures.

use cvqkd::fer::{fit_fer, homodyne_reference, FerMeasurementSet, FerPoint};

fn main() -> cvqkd::Result<()> {
    let truth = homodyne_reference();
    let trials = 100_000;
    let points = (0..30)
        .map(|i| {
            let v_a = 2.6 + 0.02 * i as f64;
            FerPoint { v_a, trials, failures: (truth.eval(v_a) * trials as f64).round() as u64 }
        })
        .collect();
    let report = fit_fer(&FerMeasurementSet::new(points)?, 4)?;
    println!(
        "{} components, rms residual {:.2e}, window [{}, {}]",
        report.effective_components,
        report.rms_residual,
        report.model.va_lo,
        report.model.va_hi
    );
    for v in [2.7, 2.8, 2.9, 3.0] {
        println!("FER({v}): fitted {:.4}, source {:.4}", report.model.eval(v), truth.eval(v));
    }
    println!("{}", report.model.to_json_string()?);
    Ok(())
}
