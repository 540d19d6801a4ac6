fn main() {
    std::process::exit(astspline::run());
}
