fn main() {
    std::process::exit(cpt_sim::cli::run_cli(std::env::args()));
}
