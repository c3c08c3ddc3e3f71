namespace kgm {}
