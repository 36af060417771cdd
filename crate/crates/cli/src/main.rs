use coherence_mc_cli::{parse_args, run};

fn main() {
    let code = match parse_args(std::env::args_os().skip(1)) {
        Ok(config) => run(&config),
        Err(e) => {
            // Help and version also land here, with exit code 0.
            let _ = e.print();
            e.exit_code()
        }
    };
    std::process::exit(code);
}
