fn main() {
    std::process::exit(dyngame_cli::run::main_entry());
}
