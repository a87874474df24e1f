fn main() {
    std::process::exit(mmthz::cli::run(std::env::args_os()));
}
