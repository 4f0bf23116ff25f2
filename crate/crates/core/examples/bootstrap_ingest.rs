//! Unit-level outcomes -> effect estimate and bootstrap covariance -> registry file.

use launch_decision::bootstrap::{bootstrap_record, BootstrapConfig};
use launch_decision::registry::RegistryStore;
use launch_decision::units::read_units;

const UNITS: &str = "\
unit_id,arm,revenue,latency_ms
u01,treatment,12.4,181
u02,treatment,9.8,176
u03,treatment,14.1,190
u04,treatment,11.0,170
u05,treatment,13.3,185
u06,treatment,10.9,179
u07,control,10.2,171
u08,control,9.1,169
u09,control,11.7,174
u10,control,8.8,166
u11,control,10.5,175
u12,control,9.9,168
";

fn main() -> launch_decision::Result<()> {
    let (schema, units) = read_units(UNITS.as_bytes())?;
    let cfg = BootstrapConfig {
        replicates: 2000,
        seed: 7,
    };
    let rec = bootstrap_record("checkout-v2", 1, schema, &units, &cfg)?;
    println!("effects (treatment - control): {:?}", rec.x.as_slice());
    println!(
        "bootstrap covariance ({} replicates, seed {}):",
        cfg.replicates, cfg.seed
    );
    for i in 0..rec.dim() {
        println!(
            "  {:?}",
            rec.sigma
                .row(i)
                .iter()
                .map(|v| format!("{v:.4}"))
                .collect::<Vec<_>>()
        );
    }

    let dir = std::env::temp_dir().join("launch-decision-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("registry.jsonl");
    let _ = std::fs::remove_file(&path);
    let store = RegistryStore::open(&path)?;
    store.append(rec)?;
    println!("\nregistered in {}:", path.display());
    print!("{}", std::fs::read_to_string(&path)?);
    Ok(())
}
