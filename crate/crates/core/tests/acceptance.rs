//! Runs acceptance criteria 1 to 9 and prints one line per criterion.

use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in backforth::acceptance::CRITERIA {
        let r = backforth::acceptance::run_criterion(id);
        println!("{r}");
        failed += usize::from(!r.passed);
    }
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}
