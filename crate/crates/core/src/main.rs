fn main() {
    let (code, text) = rewbl::cli::run_cli(std::env::args_os());
    if code >= rewbl::cli::EXIT_USAGE {
        eprint!("{text}");
    } else {
        print!("{text}");
    }
    std::process::exit(code);
}
