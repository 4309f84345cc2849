fn main() {
    // Populated once the solver modules land.
}
