use clap::{Parser, Subcommand};
use madtest_cli::commands::{
    CalibrateArgs, RobustnessArgs, TestArgs, VerifyNormalityArgs, VerifyPivotArgs, run_calibrate,
    run_robustness_study, run_test, run_verify_normality, run_verify_pivot,
};

/// Robust one-sample location testing on the median and MAD, with Monte
/// Carlo calibration and verification commands.
#[derive(Parser)]
#[command(name = "madtest", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a one-sample location test on a data file
    Test(TestArgs),
    /// Build and save a pivot quantile table for one sample size
    Calibrate(CalibrateArgs),
    /// Check that the pivot distribution is free of location and scale
    VerifyPivot(VerifyPivotArgs),
    /// Tabulate the distance of the scaled statistic from normality
    VerifyNormality(VerifyNormalityArgs),
    /// Compare robust and classical test sizes under contamination
    RobustnessStudy(RobustnessArgs),
}

fn main() {
    // Die quietly when stdout is a closed pipe (e.g. `madtest ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    // Usage errors exit with code 2 via clap; domain and verification
    // failures exit with 1 below.
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Test(args) => run_test(args),
        Command::Calibrate(args) => run_calibrate(args),
        Command::VerifyPivot(args) => run_verify_pivot(args),
        Command::VerifyNormality(args) => run_verify_normality(args),
        Command::RobustnessStudy(args) => run_robustness_study(args),
    };
    let code = match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}
