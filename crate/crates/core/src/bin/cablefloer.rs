//! Command line interface (filled in later in the build).

fn main() {
    eprintln!("Error: CLI not yet wired up");
    std::process::exit(1);
}
