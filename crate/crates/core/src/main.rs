fn main() {
    std::process::exit(zepot::cli::main_from_env());
}
