use cykernel::catalog::builtin;
use cykernel::config::SurfaceSpec;
use cykernel::report::{run_suite, Suite, SuiteConfig};
fn main() {
    let t0 = std::time::Instant::now();
    for name in ["flat", "enneper", "schwarz-p", "schwarz-p-ram"] {
        let chart = builtin(name).unwrap();
        let spec = SurfaceSpec::from_chart(&chart).unwrap();
        let cfg = SuiteConfig { suite: Suite::All, grid_n: 64, ..Default::default() };
        match run_suite(&spec, &chart, &cfg) {
            Ok(rep) => {
                println!("== {name}: all_pass = {} ({} checks, {} ms)", rep.all_pass, rep.checks.len(), rep.timing_ms);
                for c in &rep.checks {
                    if !c.pass {
                        println!("   FAIL {}  residual {:.3e} tol {:.1e} order {:?} {}",
                            c.id, c.residual, c.tolerance, c.order_estimate, c.notes.clone().unwrap_or_default());
                    }
                }
            }
            Err(e) => println!("== {name}: suite error: {e}"),
        }
    }
    println!("total {:?}", t0.elapsed());
}
