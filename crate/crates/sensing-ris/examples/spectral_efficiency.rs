//! Desk-scale spectral-efficiency sweep through the library API: oracle,
//! sensed (three pilot slots regardless of RIS size), least-squares (one
//! pilot per element), and random configurations. Pass a trial count to
//! override the quick default.

use sensing_ris::harness::{run_spectral_efficiency, ExperimentConfig};

fn main() {
    let trials: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse().expect("trials must be an integer"))
        .unwrap_or(60);
    let text = format!(
        "experiment = \"spectral-efficiency\"\nseed = 3\ntrials = {trials}\n\
         grid = [36, 44, 52]\n"
    );
    let cfg = ExperimentConfig::parse(&text, None).unwrap();
    let table = run_spectral_efficiency(&cfg).unwrap();

    println!(
        "spectral efficiency, bits/s/Hz, {} x {} RIS, {trials} trials per point:",
        cfg.scenario.ris_rows, cfg.scenario.ris_cols
    );
    println!("  P_max_dBm   oracle   sensed    ls-ce   random   sensed/oracle");
    for row in &table.rows {
        println!(
            "  {:>9} {:>8.3} {:>8.3} {:>8.3} {:>8.3}   {:>6.2}%",
            row[0],
            row[1],
            row[2],
            row[3],
            row[4],
            100.0 * row[2] / row[1]
        );
    }
    let pilots_irf = table.column("pilots_irf").unwrap()[0];
    let pilots_ls = table.column("pilots_lsce").unwrap()[0];
    println!("\npilot slots: sensed = {pilots_irf} (independent of N), ls-ce = {pilots_ls}");
}
