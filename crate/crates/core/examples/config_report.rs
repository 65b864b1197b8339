//! Running a TOML configuration in-process and writing the JSON report and CSV table.

use rsrr::config::RunConfig;
use rsrr::driver::solve_rsrr;
use rsrr::report::{write_eigenvalue_csv, RunReport};

const CONFIG: &str = r#"
[problem]
kind = "linear_random"
n = 50
inside = 12
seed = 3

[contour]
shape = "ellipse"
center = [0.0, 0.0]
a = 1.0
b = 1.0

[rsrr]
L = 4
N = 32
K = 2
N_S = 128
"#;

fn main() -> rsrr::Result<()> {
    let cfg = RunConfig::from_toml_str(CONFIG)?;
    let problem = cfg.problem.build()?;
    let sol = solve_rsrr(&problem, &cfg.solver_config())?;

    let report = RunReport::new("solve", &cfg, &sol);
    let dir = std::env::temp_dir();
    report.write(dir.join("rsrr_report.json"))?;
    write_eigenvalue_csv(std::fs::File::create(dir.join("rsrr_eigenvalues.csv"))?, &sol)?;
    write_eigenvalue_csv(std::io::stdout().lock(), &sol)?;
    println!("report written to {}", dir.join("rsrr_report.json").display());
    Ok(())
}
