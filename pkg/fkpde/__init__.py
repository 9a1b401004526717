from fkpde.solver import (FkGrid, FkSolution, check_transformation, laplace_of_law, refinement_study, solve_fk,
                          solve_fk_transformed)
