import dgsim
