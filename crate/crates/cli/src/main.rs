fn main() {
    std::process::exit(heisenberg_lab::run(std::env::args_os()));
}
