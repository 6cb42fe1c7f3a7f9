use std::process::ExitCode;

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (`asymtorus symbols | head`)
    // instead of panicking mid-listing.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    asymtorus_lab::cli::run()
}
