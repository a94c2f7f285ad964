#include <filesystem>
#include <iostream>

#include "arw/mesh_io.hpp"
#include "arw/shapes.hpp"

// Writes the committed mesh assets referenced by the scenario files.
int main(int argc, char** argv) {
  std::string dir = argc > 1 ? argv[1] : "assets";
  std::filesystem::create_directories(dir);
  auto at = [&](const std::string& name) { return dir + "/" + name; };

  arw::save_obj(arw::shapes::make_unit_cube(), at("cube.obj"));
  arw::save_obj(arw::shapes::make_cylinder(1.0, 2.0, 50), at("cylinder200.obj"));
  arw::save_obj(arw::shapes::make_icosphere(1.0, 3), at("sphere1280.obj"));
  arw::save_obj(arw::shapes::make_room({0, 0, 0}, {4, 4, 2}), at("room4x4x2.obj"));

  // Sealed 3 x 4 x 1 room with a central pillar: two corridors around it.
  std::vector<arw::Triangle> tris = arw::shapes::make_room({0, 0, 0}, {3, 4, 1}).triangles();
  for (const auto& t : arw::shapes::make_box({1.2, 1.0, 0}, {1.8, 3.0, 1}).triangles())
    tris.push_back(t);
  arw::save_obj(arw::TriangleMesh(tris), at("corridor.obj"));
  std::cout << "wrote assets to " << dir << "\n";
  return 0;
}
