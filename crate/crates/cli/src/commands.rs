//! Command implementations. File writes go to a temp file in the target
//! directory and are renamed into place, so a failing command leaves no
//! partial state behind.

use crate::config::RunConfigFile;
use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use slowreveal_core::numtheory::digit_count;
use slowreveal_core::{
    candidate_space, crack, run_simulation, write_summary_csv, write_timeline_csv, Bulletin,
    CrackBudget, CrackResult, Secret,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

pub const EXIT_BUDGET_EXCEEDED: u8 = 2;
pub const EXIT_NOT_FOUND: u8 = 3;

pub fn bulletin_path(out_dir: &Path) -> PathBuf {
    out_dir.join("bulletin.json")
}

pub fn secret_path(out_dir: &Path) -> PathBuf {
    out_dir.join("secret.json")
}

/// Generate the secret and publish the bulletin and code list.
pub fn cmd_setup(run: &RunConfigFile, out_dir: &Path, seed: u64) -> Result<()> {
    let config = run.to_protocol_config()?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (secret, bulletin) = slowreveal_core::setup(&config, &mut rng)?;

    let codes_path = out_dir.join("codes.csv");
    let mut codes = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut codes);
        w.write_record(["code", "label"])?;
        for (code, label) in config.code_labels.iter().enumerate() {
            w.write_record([&code.to_string(), label])?;
        }
        w.flush()?;
    }
    write_atomic(&codes_path, &codes)?;

    let bpath = bulletin_path(out_dir);
    let spath = secret_path(out_dir);
    bulletin.save(&bpath)?;
    secret.save(&spath)?;

    println!("seed: {seed}");
    println!("n: {} ({} digits)", bulletin.n, digit_count(&bulletin.n));
    println!("codes: {}", codes_path.display());
    println!("bulletin: {}", bpath.display());
    println!("secret: {} (owner-only)", spath.display());
    Ok(())
}

/// Append the next `count` digits of `p` to the bulletin.
pub fn cmd_reveal(out_dir: &Path, count: u32) -> Result<()> {
    if count == 0 {
        bail!("--count must be at least 1");
    }
    let bpath = bulletin_path(out_dir);
    let mut bulletin = Bulletin::load(&bpath)?;
    let secret = Secret::load(&secret_path(out_dir))?;
    let mut digits = String::new();
    for _ in 0..count {
        let d = bulletin.reveal_next(&secret)?;
        digits.push(char::from(b'0' + d));
    }
    bulletin.save(&bpath)?;
    println!("revealed: {digits}");
    println!(
        "day {} of {}, {} remaining",
        bulletin.day,
        bulletin.config.days,
        bulletin.days_remaining()
    );
    Ok(())
}

/// Attempt to recover `p` from a public bulletin under a division budget.
pub fn cmd_crack(bulletin_file: &Path, budget: u64) -> Result<ExitCode> {
    if budget == 0 {
        bail!("--budget must be at least 1");
    }
    let bulletin = Bulletin::load(bulletin_file)?;
    let start = Instant::now();
    let result = crack(&bulletin, &CrackBudget::new(budget))?;
    let elapsed_ms = start.elapsed().as_millis() as u64;
    let space = candidate_space(bulletin.config.digits, bulletin.day);

    let mut report = serde_json::to_value(&result)?;
    let obj = report.as_object_mut().expect("crack result is an object");
    obj.insert("candidateCount".into(), space.to_string().into());
    obj.insert("elapsedMs".into(), elapsed_ms.into());
    println!("{}", serde_json::to_string_pretty(&report)?);

    Ok(match result {
        CrackResult::Found { .. } => ExitCode::SUCCESS,
        CrackResult::BudgetExceeded { .. } => ExitCode::from(EXIT_BUDGET_EXCEEDED),
        CrackResult::NotFound => ExitCode::from(EXIT_NOT_FOUND),
    })
}

/// Check a completed reveal and name the winner.
pub fn cmd_verify(bulletin_file: &Path) -> Result<ExitCode> {
    let bulletin = Bulletin::load(bulletin_file)?;
    let report = bulletin.verify()?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    if report.passed() {
        let winner = report.winner.expect("passing report names a winner");
        let label = &bulletin.config.code_labels[winner.value() as usize];
        println!(
            "payout: ${} to code {winner} ({label})",
            report.payout.expect("passing report carries the payout")
        );
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("verification failed");
        Ok(ExitCode::FAILURE)
    }
}

/// Run the full simulation and export the CSV reports.
pub fn cmd_simulate(run: &RunConfigFile, out_dir: &Path, seed: u64) -> Result<()> {
    let config = run.to_protocol_config()?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating {}", out_dir.display()))?;
    let report = run_simulation(&config, &run.agent_profiles(), &run.base_caps(), seed)?;

    let timeline_path = out_dir.join("timeline.csv");
    let mut timeline = Vec::new();
    write_timeline_csv(&report, &mut timeline)?;
    write_atomic(&timeline_path, &timeline)?;

    let summary_path = out_dir.join("summary.csv");
    let mut summary = Vec::new();
    write_summary_csv(&report, &mut summary)?;
    write_atomic(&summary_path, &summary)?;

    println!("seed: {seed}");
    println!("jump_day: {}", report.jump_day);
    for (name, day) in &report.crack_day_per_agent {
        match day {
            Some(d) => println!("crack_day:{name}: {d}"),
            None => println!("crack_day:{name}: never"),
        }
    }
    println!("timeline: {}", timeline_path.display());
    println!("summary: {}", summary_path.display());
    Ok(())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path)
        .map_err(|e| anyhow::Error::from(e.error))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
