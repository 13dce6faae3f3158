use std::process::exit;

fn main() {
    exit(halfline::cli::main_entry());
}
